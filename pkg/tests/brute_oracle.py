"""Hand-rolled graded dimension counts for two small fans.

Shares no code with the package: pieces are enumerated monomial by
monomial and the defining linear systems are solved with plain Fraction
elimination.  Functions on a full cone are homogeneous polynomials in
the ambient coordinates; on a ray they are polynomials in one parameter
via the parametrization t -> t * ray; at the origin only the ground
field survives.  All generators sit in degree -(ambient dimension), and
a variable has degree 2, so the piece of internal degree d on a cone
holds the monomials of polynomial degree (d + n) / 2.
"""

from fractions import Fraction


def monos2(j):
    """Monomials x^a y^b of polynomial degree j."""
    if j < 0:
        return []
    return [(a, j - a) for a in range(j + 1)]


def rank(mat):
    """Rank of a small matrix over the rationals, plain elimination."""
    rows = [[Fraction(x) for x in row] for row in mat if any(row)]
    r = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        piv = None
        for i in range(r, len(rows)):
            if rows[i][col]:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][col]:
                f = rows[i][col] / rows[r][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        r += 1
        if r == len(rows):
            break
    return r


def line_dims(window):
    """Module and cohomology dimensions for the fan of the line.

    Cones: origin 'o', rays 'plus' and 'minus'.  Each ray module is free
    of rank one on a degree -1 generator; its piece at degree d is the
    single monomial t^((d+1)/2).  The origin keeps the ground field in
    degree -1, and each ray generator restricts to it with coefficient 1.
    """
    lo, hi = window
    modules = {}
    cohom = {}
    for d in range(lo, hi + 1):
        ray_dim = 1 if d >= -1 and (d + 1) % 2 == 0 else 0
        o_dim = 1 if d == -1 else 0
        modules[("o", d)] = o_dim
        modules[("plus", d)] = ray_dim
        modules[("minus", d)] = ray_dim
        if ray_dim and o_dim:
            # t^0 generators restrict to the field generator
            boundary = [[1, 1]]
        else:
            boundary = []
        rk = rank(boundary) if boundary else 0
        h_rays = 2 * ray_dim - rk
        h_o = o_dim - rk
        if h_rays:
            cohom[(-1, d)] = h_rays
        if h_o:
            cohom[(0, d)] = h_o
    return modules, cohom


def _ray_row(j, ray):
    """Restriction of the degree-j monomials to a ray, coefficient of t^j."""
    return [
        Fraction(ray[0]) ** a * Fraction(ray[1]) ** b for (a, b) in monos2(j)
    ]


def subdivided_quadrant_dims(window):
    """Dimensions for the quadrant subdivided along the diagonal.

    Rays u = (1,0), m = (1,1), v = (0,1); full cones s1 = <u, m> and
    s2 = <m, v>.  Boundary coefficients on each full cone are +1 toward
    its first listed ray and -1 toward the second, which makes the
    composite through the origin cancel.  Returns module dimensions
    keyed by (rayset, degree) and cohomology keyed by (slot, degree).
    """
    lo, hi = window
    u, m, v = (1, 0), (1, 1), (0, 1)
    modules = {}
    cohom = {}
    for d in range(lo, hi + 1):
        if (d + 2) % 2:
            continue
        j = (d + 2) // 2
        two_dim = len(monos2(j))
        ray_dim = 1 if j >= 0 else 0
        o_dim = 1 if d == -2 else 0
        modules[(frozenset([u, m]), d)] = two_dim
        modules[(frozenset([m, v]), d)] = two_dim
        for r in (u, m, v):
            modules[(frozenset([r]), d)] = ray_dim
        modules[(frozenset(), d)] = o_dim
        # slot -2 -> slot -1: rows u, m, v over columns s1 then s2
        d2 = []
        if ray_dim:
            zero = [Fraction(0)] * two_dim
            d2.append(_ray_row(j, u) + zero)
            d2.append([-c for c in _ray_row(j, m)] + _ray_row(j, m))
            d2.append(zero + [-c for c in _ray_row(j, v)])
        # slot -1 -> slot 0: each ray generator restricts to the field
        d1 = [[1, 1, 1]] if (ray_dim and o_dim) else []
        rk2 = rank(d2) if d2 else 0
        rk1 = rank(d1) if d1 else 0
        h2 = 2 * two_dim - rk2
        h1 = 3 * ray_dim - rk2 - rk1
        h0 = o_dim - rk1
        for slot, val in ((-2, h2), (-1, h1), (0, h0)):
            if val:
                cohom[(slot, d)] = val
    return modules, cohom


def quadrant_image_dims(window):
    """Section dimensions of the direct image on the undivided quadrant.

    At the top cone, sections are pairs of polynomials on the two tiles
    whose boundary components along the shared interior ray cancel; on
    rays and at the origin the image keeps the single tile's module.
    """
    lo, hi = window
    m = (1, 1)
    out = {}
    for d in range(lo, hi + 1):
        if (d + 2) % 2:
            continue
        j = (d + 2) // 2
        two_dim = len(monos2(j))
        if two_dim == 0:
            continue
        wall = [[-c for c in _ray_row(j, m)] + _ray_row(j, m)]
        out[d] = 2 * two_dim - rank(wall)
    return out
