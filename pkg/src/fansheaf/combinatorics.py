"""Combinatorial predictions for stalk generator degrees.

The face lattice alone determines the generator degrees of the minimal
complex at each cone.  Accumulating over proper faces gives a lattice
polynomial h; its truncated difference polynomial g predicts g_i
generators in degree -n + 2i for each cone.  The recursion is purely
combinatorial (integer polynomial arithmetic over the face poset), so it
shares nothing with the module-theoretic builder and serves as an
independent oracle for it.
"""

from math import comb

from fansheaf.errors import InputError


def _shifted_binomial(m):
    """Coefficients of (t - 1)^m."""
    return [comb(m, i) * (-1) ** (m - i) for i in range(m + 1)]


def _add_scaled(acc, poly, shift_poly):
    prod = [0] * (len(poly) + len(shift_poly) - 1)
    for i, a in enumerate(poly):
        if a:
            for j, b in enumerate(shift_poly):
                prod[i + j] += a * b
    for i, a in enumerate(prod):
        if i >= len(acc):
            acc.extend([0] * (i - len(acc) + 1))
        acc[i] += a
    return acc


def h_vector(fan, cone_id, _cache=None):
    """Lattice polynomial of a cone, accumulated over its proper faces."""
    if _cache is None:
        _cache = {}
    cone = fan.cones[cone_id]
    k = cone.dim
    if k == 0:
        return (1,)
    acc = [0] * k
    for f in cone.face_ids:
        if f == cone_id:
            continue
        g = g_vector(fan, f, _cache)
        _add_scaled(acc, list(g), _shifted_binomial(k - 1 - fan.cones[f].dim))
    while acc and acc[-1] == 0:
        acc.pop()
    return tuple(acc)


def g_vector(fan, cone_id, _cache=None):
    """Truncated difference polynomial of the cone's lattice polynomial."""
    if _cache is None:
        _cache = {}
    if cone_id in _cache:
        return _cache[cone_id]
    cone = fan.cones[cone_id]
    k = cone.dim
    if k == 0:
        out = (1,)
    else:
        h = h_vector(fan, cone_id, _cache)
        half = (k - 1) // 2
        out = []
        prev = 0
        for i in range(half + 1):
            cur = h[i] if i < len(h) else 0
            out.append(cur - prev)
            prev = cur
        while out and out[-1] == 0:
            out.pop()
        out = tuple(out)
    _cache[cone_id] = out
    return out


def predicted_stalk_degrees(fan, cone_id, _cache=None):
    """Generator degrees the minimal complex must show at this cone."""
    g = g_vector(fan, cone_id, _cache)
    if any(c < 0 for c in g):
        raise InputError(
            f"cone {cone_id}: difference polynomial {g} has negative entries"
        )
    n = fan.n
    out = []
    for i, c in enumerate(g):
        out.extend([-n + 2 * i] * c)
    return tuple(out)


def predicted_stalks(fan):
    """Predicted stalk degrees for every cone, one shared cache."""
    cache = {}
    return {
        c.index: predicted_stalk_degrees(fan, c.index, cache)
        for c in fan.cones
    }


def complete_fan_h_vector(fan):
    """Lattice polynomial accumulated over every cone of the fan.

    For complete fans this predicts the generator degrees of the top
    cohomology module: h_i generators in degree -n + 2i.  The vector is
    palindromic for complete fans, which the tests exploit as an extra
    consistency check.
    """
    cache = {}
    acc = [0] * (fan.n + 1)
    for c in fan.cones:
        _add_scaled(
            acc,
            list(g_vector(fan, c.index, cache)),
            _shifted_binomial(fan.n - c.dim),
        )
    while acc and acc[-1] == 0:
        acc.pop()
    return tuple(acc)


def predicted_ih_degrees(fan):
    """Generator degrees the top cohomology must show, for complete fans."""
    h = complete_fan_h_vector(fan)
    if any(c < 0 for c in h):
        raise InputError(f"accumulated polynomial {h} has negative entries")
    n = fan.n
    out = []
    for i, c in enumerate(h):
        out.extend([-n + 2 * i] * c)
    return tuple(out)
