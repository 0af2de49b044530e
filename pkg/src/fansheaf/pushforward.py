"""Direct images of complexes along proper subdivision maps.

For each target cone the direct image module is carved out of the sum of
the modules on its same-dimension preimage tiles: sections must glue
across interior walls (their signed differential components cancel) and
must map into the already-built module on every target facet.  A minimal
free cover of that kernel family gives the new module, with degreewise
freeness certified by Hilbert comparison, and the induced differential
is read off by exact solves against the facet covers.
"""

from fractions import Fraction

from fansheaf import _linalg
from fansheaf.complexes import (
    FanComplex,
    assemble,
    check_complex,
    check_locally_exact,
    cohomology_degreewise,
)
from fansheaf.errors import CertificateError, InputError, WindowExhausted
from fansheaf.modules import (
    DirectSumAmbient,
    PolyMatrix,
    RingTower,
    cover_is_free_certificate,
    default_window,
    family_from_kernel,
    minimal_free_cover,
    pm_scale,
)
from fansheaf.polys import Poly


class Pushforward:
    """Direct image complex plus the per-cone section data behind it."""

    def __init__(self, complex, fan_map, source, families, covers, tiles):
        self.complex = complex
        self.fan_map = fan_map
        self.source = source
        self.families = families
        self.covers = covers
        self.tiles = tiles


def _cross_images(tgt_fan, tgt_id, nvars_tgt, src_ring):
    """Variable images for the map from a target cone's ring into the
    ring of a source cone spanning the same subspace."""
    cols = []
    for b in src_ring.basis:
        coords = tgt_fan.ray_coords(tgt_id, b)
        if coords is None:
            raise InputError(
                f"tile basis vector {b} outside target cone {tgt_id} span"
            )
        cols.append(coords)
    return tuple(
        Poly.linear(src_ring.nvars, [col[i] for col in cols])
        for i in range(nvars_tgt)
    )


def pushforward(fan_map, M, window=None):
    """Direct image of a complex along a proper subdivision map."""
    if not fan_map.proper:
        raise InputError("direct image requires a proper subdivision map")
    if M.fan is not fan_map.source:
        raise InputError("complex does not live on the map's source fan")
    if window is None:
        window = M.window or default_window(fan_map.target.n)
    src_fan, tgt_fan = fan_map.source, fan_map.target
    tower = RingTower(tgt_fan)
    N = FanComplex(tgt_fan, tower, {}, {}, window=window)
    families, covers, tiles_map = {}, {}, {}
    walls = {}
    for w, t in enumerate(fan_map.assignment):
        if src_fan.cones[w].dim == tgt_fan.cones[t].dim - 1 and M.rank_at(w):
            walls.setdefault(t, []).append(w)
    for sigma in tgt_fan.cones:
        s = sigma.index
        tiles = [i for i in fan_map.preimage_cones(s) if M.rank_at(i)]
        if not tiles:
            continue
        ring = tower.ring(s)
        parts = tuple(M.modules[i] for i in tiles)
        substs = tuple(
            _cross_images(tgt_fan, s, ring.nvars, M.tower.ring(i))
            for i in tiles
        )
        ambient = DirectSumAmbient(ring, parts, substs)
        facet_data = [
            (f, tiles_map[f], families[f])
            for f in sigma.facet_ids
            if f in families
        ]
        rows_at = _constraints(M, tiles, walls.get(s, []), facet_data)
        fam = family_from_kernel(ambient, rows_at, window)
        try:
            cover = minimal_free_cover(fam, ring)
        except WindowExhausted as exc:
            raise WindowExhausted(
                f"target cone {s}: {exc}", cone=s, degree=exc.degree
            ) from None
        ok, offender = cover_is_free_certificate(cover)
        if not ok:
            raise CertificateError(
                f"direct image over cone {s} is not degreewise free "
                f"at degree {offender}"
            )
        families[s] = fam
        covers[s] = cover
        tiles_map[s] = tiles
        if cover.module.rank() == 0:
            continue
        N.modules[s] = cover.module
        for f, ftiles, _ in facet_data:
            if f not in N.modules:
                continue
            fcover = covers[f]
            entries = {}
            for col, (dg, vec) in enumerate(cover.gens):
                D = assemble(M, tiles, ftiles, dg)
                img = [
                    sum(row[j] * vec[j] for j in range(len(vec)) if vec[j])
                    for row in D
                ]
                if not any(img):
                    continue
                sol = _linalg.solve(
                    fcover.evaluate(dg), img, fcover.module.dim_at(dg)
                )
                if sol is None:
                    raise CertificateError(
                        f"direct image differential {s}->{f} misses the "
                        f"facet module at degree {dg}"
                    )
                for (j, u), x in zip(fcover.module.piece_basis(dg), sol):
                    if x:
                        key = (j, col)
                        cur = entries.get(
                            key, Poly(fcover.module.ring.nvars)
                        )
                        entries[key] = cur + Poly(
                            fcover.module.ring.nvars, {u: Fraction(x)}
                        )
            if not entries:
                continue
            true_pm = PolyMatrix(
                cover.module, fcover.module, tower.restriction(s, f), entries
            )
            true_pm.validate()
            N.maps[(s, f)] = pm_scale(
                true_pm, tgt_fan.incidence_sign(s, f)
            )
    return Pushforward(N, fan_map, M, families, covers, tiles_map)


def _constraints(M, tiles, interior_walls, facet_data):
    def rows_at(d):
        rows = [
            row
            for row in assemble(M, tiles, interior_walls, d)
            if any(row)
        ]
        for _, ftiles, ffam in facet_data:
            D = assemble(M, tiles, ftiles, d)
            if not D:
                continue
            basis = [list(v) for v in ffam.basis_at(d)]
            ncols_f = ffam.ambient.dim_at(d)
            if basis:
                ann = _linalg.nullspace(basis, ncols_f)
            else:
                ann = [
                    [1 if i == j else 0 for j in range(ncols_f)]
                    for i in range(ncols_f)
                ]
            for c in ann:
                row = [
                    sum(c[r] * D[r][j] for r in range(len(D)) if c[r])
                    for j in range(len(D[0]))
                ]
                if any(row):
                    rows.append(row)
        return rows

    return rows_at


class PushforwardReport:
    def __init__(self, ok, problems):
        self.ok = ok
        self.problems = problems

    def __bool__(self):
        return self.ok


def verify_pushforward(P):
    """Certify the direct image: valid complex, locally exact, modules
    degreewise free, and global cohomology equal to the source's.
    """
    problems = []
    rep = check_complex(P.complex)
    if not rep.ok:
        problems += ["invalid complex: " + p for p in rep.problems]
    window = P.complex.window
    exact = check_locally_exact(P.complex, window)
    if not exact.ok:
        problems += [
            f"not exact at cone {i} degree {d}: {why}"
            for i, d, why in exact.failures
        ]
    for s, cover in P.covers.items():
        ok, offender = cover_is_free_certificate(cover)
        if not ok:
            problems.append(
                f"module over cone {s} not free at degree {offender}"
            )
    src_table = cohomology_degreewise(P.source, window).table
    tgt_table = cohomology_degreewise(P.complex, window).table
    if src_table != tgt_table:
        diff = {
            k: (src_table.get(k, 0), tgt_table.get(k, 0))
            for k in set(src_table) | set(tgt_table)
            if src_table.get(k, 0) != tgt_table.get(k, 0)
        }
        problems.append(f"global cohomology changed: {diff}")
    return PushforwardReport(not problems, problems)
