"""Complexes of graded modules on a fan.

A FanComplex places a free graded module on each cone (missing = zero)
and an unsigned component map on each (cone, facet) pair; the actual
differential multiplies each component by the fan's deterministic
incidence sign, sending the sum of the dimension-i modules to the sum of
the dimension-(i-1) modules.  Homological degree of a cone's slot is
minus its dimension.

check_complex certifies shapes, grading, and the vanishing of the
composite differential symbolically; check_locally_exact certifies the
surjectivity of each module onto the boundary kernel of its own cone
degree by degree.  Both run on arbitrary complexes, not only the ones
built by this package.
"""

from fractions import Fraction

from fansheaf import _linalg
from fansheaf.errors import CertificateError, InputError
from fansheaf.fans import Fan
from fansheaf.modules import (
    DirectSumAmbient,
    FreeGradedModule,
    PolyMatrix,
    RingTower,
    compose,
    family_from_kernel,
    minimal_free_cover,
    pm_add,
    pm_scale,
)
from fansheaf.polys import format_poly, parse_poly


class FanComplex:
    """Modules and unsigned facet maps on a fan's cones."""

    def __init__(self, fan, tower, modules, maps, window=None):
        self.fan = fan
        self.tower = tower
        self.modules = dict(modules)
        self.maps = dict(maps)
        self.window = window

    def module_at(self, i):
        return self.modules.get(i)

    def rank_at(self, i):
        m = self.modules.get(i)
        return m.rank() if m is not None else 0

    def degrees_at(self, i):
        m = self.modules.get(i)
        return m.degrees if m is not None else ()

    def dim_at(self, i, d):
        m = self.modules.get(i)
        return m.dim_at(d) if m is not None else 0

    def support_ids(self):
        return tuple(sorted(i for i, m in self.modules.items() if m.rank()))


def assemble(M, src_ids, tgt_ids, d):
    """Signed block matrix of the differential between listed cones.

    Columns follow src_ids order (each cone contributing its degree-d
    piece), rows follow tgt_ids order.  Blocks exist where the target is
    a facet of the source and a component map is present.
    """
    col_off, ncols = _offsets(M, src_ids, d)
    row_off, nrows = _offsets(M, tgt_ids, d)
    rows = [[Fraction(0)] * ncols for _ in range(nrows)]
    tgt_pos = {t: k for k, t in enumerate(tgt_ids)}
    for si, s in enumerate(src_ids):
        for t in M.fan.cones[s].facet_ids:
            if t not in tgt_pos or (s, t) not in M.maps:
                continue
            sign = M.fan.incidence_sign(s, t)
            block = M.maps[(s, t)].evaluate(d)
            r0 = row_off[tgt_pos[t]]
            c0 = col_off[si]
            for r, brow in enumerate(block):
                out = rows[r0 + r]
                for c, x in enumerate(brow):
                    if x:
                        out[c0 + c] = sign * x
    return rows


def _offsets(M, ids, d):
    offs = []
    total = 0
    for i in ids:
        offs.append(total)
        total += M.dim_at(i, d)
    return offs, total


class ComplexCheckReport:
    def __init__(self, ok, problems):
        self.ok = ok
        self.problems = problems

    def __bool__(self):
        return self.ok


def check_complex(M):
    """Certify shapes, grading, and d after d = 0 symbolically."""
    problems = []
    fan = M.fan
    for (s, t), pm in M.maps.items():
        if not fan.is_facet(t, s):
            problems.append(f"map {s}->{t}: target is not a facet of source")
            continue
        if pm.source is not M.modules.get(s) or pm.target is not M.modules.get(t):
            problems.append(f"map {s}->{t}: bound to wrong modules")
            continue
        try:
            pm.validate()
        except (CertificateError, InputError) as exc:
            problems.append(f"map {s}->{t}: {exc}")
    if problems:
        return ComplexCheckReport(False, problems)
    for sigma in M.fan.cones:
        s = sigma.index
        if M.rank_at(s) == 0 or sigma.dim < 2:
            continue
        for rho_id in sigma.face_ids:
            if fan.cones[rho_id].dim != sigma.dim - 2:
                continue
            total = None
            for t in sigma.facet_ids:
                if rho_id not in fan.cones[t].facet_ids:
                    continue
                if (s, t) not in M.maps or (t, rho_id) not in M.maps:
                    continue
                sign = fan.incidence_sign(s, t) * fan.incidence_sign(t, rho_id)
                term = pm_scale(
                    compose(M.maps[(t, rho_id)], M.maps[(s, t)]), sign
                )
                total = term if total is None else pm_add(total, term)
            if total is not None and not total.is_zero():
                problems.append(
                    f"composite differential {s} -> {rho_id} is nonzero"
                )
    return ComplexCheckReport(not problems, problems)


def boundary_setup(M, cone_id):
    """Ambient sum of a cone's facet modules plus its constraint rows.

    Returns (ambient, facets, rows_at): the facet modules viewed over
    the cone's ring, the facet ids in part order, and the degreewise
    constraint rows (signed maps from facets into codimension-2 faces
    inside the cone).
    """
    fan = M.fan
    cone = fan.cones[cone_id]
    facets = [i for i in cone.facet_ids if M.rank_at(i)]
    ring = M.tower.ring(cone_id)
    parts = tuple(M.modules[i] for i in facets)
    substs = tuple(M.tower.restriction(cone_id, i) for i in facets)
    ambient = DirectSumAmbient(ring, parts, substs)
    codim2 = [
        i
        for i in cone.face_ids
        if fan.cones[i].dim == cone.dim - 2 and M.rank_at(i)
    ]

    def rows_at(d):
        return [
            row
            for row in assemble(M, facets, codim2, d)
            if any(row)
        ]

    return ambient, facets, rows_at


def boundary_kernel(M, cone_id, window):
    """Kernel family of the restricted complex at a cone's own slot."""
    ambient, facets, rows_at = boundary_setup(M, cone_id)
    fam = family_from_kernel(ambient, rows_at, window)
    return fam, facets


class LocalExactnessReport:
    def __init__(self, ok, failures):
        self.ok = ok
        self.failures = failures

    def __bool__(self):
        return self.ok


def check_locally_exact(M, window):
    """Certify that each module surjects onto its boundary kernel.

    For every positive-dimensional cone and every window degree, the
    image of the cone's module under the signed facet maps must span the
    kernel of the next differential of the restricted complex.
    """
    lo, hi = window
    failures = []
    for cone in M.fan.cones:
        if cone.dim == 0:
            continue
        i = cone.index
        fam, facets = boundary_kernel(M, i, window)
        has_module = M.rank_at(i) > 0
        for d in range(lo, hi + 1):
            zdim = fam.dim_at(d)
            if not has_module:
                if zdim:
                    failures.append((i, d, f"kernel dim {zdim}, no module"))
                continue
            # image vectors are the columns of the assembled map
            mat = assemble(M, [i], facets, d)
            cols = M.dim_at(i, d)
            img_rows = [
                [mat[r][c] for r in range(len(mat))] for c in range(cols)
            ]
            zrows = [list(v) for v in fam.basis_at(d)]
            ri = _linalg.rank(img_rows)
            if ri != zdim:
                failures.append((i, d, f"image rank {ri}, kernel dim {zdim}"))
                continue
            if zdim and _linalg.rank(img_rows + zrows) != zdim:
                failures.append((i, d, "image not inside kernel"))
    return LocalExactnessReport(not failures, failures)


class SupportReport:
    """Per-cone generator degrees of a complex."""

    def __init__(self, entries):
        self.entries = entries  # list of (cone_id, dim, degrees tuple)

    def __str__(self):
        lines = ["cone  dim  generator degrees"]
        for i, dim, degs in self.entries:
            lines.append(f"{i:4d}  {dim:3d}  {list(degs)}")
        return "\n".join(lines)


def support_report(M):
    return SupportReport(
        [
            (c.index, c.dim, M.degrees_at(c.index))
            for c in M.fan.cones
            if M.rank_at(c.index)
        ]
    )


def restrict_to_subfan(M, cone_ids):
    """Restriction of the complex to a face-closed set of cones.

    Returns (complex on the subfan as its own Fan, old-to-new id map).
    Chosen ray bases agree vector by vector, so module and map data are
    transported verbatim.
    """
    wanted = set(cone_ids)
    for i in wanted:
        missing = [f for f in M.fan.cones[i].face_ids if f not in wanted]
        if missing:
            raise InputError(
                f"subfan not face-closed: cone {i} needs faces {missing}"
            )
    old_fan = M.fan
    ray_ids = sorted({r for i in wanted for r in old_fan.cones[i].rays})
    ray_vecs = [old_fan.rays[r] for r in ray_ids]
    ray_pos = {r: k for k, r in enumerate(ray_ids)}
    gen_sets = [
        [ray_pos[r] for r in old_fan.cones[i].rays]
        for i in wanted
    ]
    sub = Fan.from_cones(old_fan.n, ray_vecs, gen_sets, validate=False)
    id_map = {}
    for i in wanted:
        vecs = frozenset(
            sub.rays.index(old_fan.rays[r]) for r in old_fan.cones[i].rays
        )
        id_map[i] = sub.cone_by_rays(vecs)
    tower = RingTower(sub)
    modules = {}
    for i in wanted:
        m = M.modules.get(i)
        if m is not None:
            modules[id_map[i]] = FreeGradedModule(
                tower.ring(id_map[i]), m.degrees
            )
    maps = {}
    for (s, t), pm in M.maps.items():
        if s in wanted and t in wanted:
            ns, nt = id_map[s], id_map[t]
            maps[(ns, nt)] = PolyMatrix(
                modules[ns],
                modules[nt],
                tower.restriction(ns, nt),
                pm.entries,
            )
    return FanComplex(sub, tower, modules, maps, window=M.window), id_map


class CohomologyReport:
    """Degreewise cohomology dims, optionally with the top module data."""

    def __init__(self, window, table, top=None):
        self.window = window
        self.table = table  # {(p, d): dim}, zero entries omitted
        self.top = top

    def dims_at(self, p):
        return {d: v for (q, d), v in self.table.items() if q == p}

    def nonzero_slots(self):
        return sorted({p for (p, d) in self.table})


class TopModuleReport:
    """H at the top slot viewed over the full coordinate ring."""

    def __init__(self, free, generator_degrees, offender):
        self.free = free
        self.generator_degrees = generator_degrees
        self.offender = offender


def cohomology_degreewise(M, window, with_top=False):
    """Cohomology dimensions per (slot, degree) over the window.

    Slot p holds the cones of dimension -p.  When with_top is set, the
    kernel at the lowest slot is additionally analyzed as a module over
    the full coordinate ring: its minimal generators are computed and
    degreewise freeness is certified by Hilbert comparison.
    """
    lo, hi = window
    n = M.fan.n
    table = {}
    by_dim = {
        k: [i for i in M.fan.cones_of_dim(k) if M.rank_at(i)]
        for k in range(n + 1)
    }
    for p in range(-n, 1):
        srcs = by_dim.get(-p, [])
        tgts = by_dim.get(-p - 1, [])
        nxts = by_dim.get(-p + 1, [])
        if not srcs:
            continue
        for d in range(lo, hi + 1):
            dim_here = sum(M.dim_at(i, d) for i in srcs)
            if dim_here == 0:
                continue
            out_rank = _linalg.rank(assemble(M, srcs, tgts, d)) if tgts else 0
            in_rank = _linalg.rank(assemble(M, nxts, srcs, d)) if nxts else 0
            h = dim_here - out_rank - in_rank
            if h < 0:
                raise CertificateError(
                    f"negative cohomology dimension at slot {p} degree {d}"
                )
            if h:
                table[(p, d)] = h
    top = None
    if with_top:
        top = _top_module(M, window, by_dim.get(n, []))
    return CohomologyReport(window, table, top)


def _top_module(M, window, top_ids):
    if not top_ids:
        return TopModuleReport(False, (), "no top-dimensional modules")
    ring = M.tower.ring("A")
    parts = tuple(M.modules[i] for i in top_ids)
    substs = tuple(M.tower.restriction("A", i) for i in top_ids)
    ambient = DirectSumAmbient(ring, parts, substs)
    n = M.fan.n
    tgts = [i for i in M.fan.cones_of_dim(n - 1) if M.rank_at(i)]

    def rows_at(d):
        return [row for row in assemble(M, top_ids, tgts, d) if any(row)]

    fam = family_from_kernel(ambient, rows_at, window)
    cover = minimal_free_cover(fam, ring)
    lo, hi = window
    offender = None
    for d in range(lo, hi + 1):
        if cover.module.dim_at(d) != fam.dim_at(d):
            offender = d
            break
    return TopModuleReport(
        offender is None, tuple(cover.module.degrees), offender
    )


# ----- serialization -----

FORMAT_LINE = "complex-format 1"


def complex_to_text(M):
    """Canonical text form embedding the fan, windows, modules, maps,
    and the incidence signs actually used."""
    lines = [FORMAT_LINE]
    if M.window is not None:
        lines.append(f"window {M.window[0]} {M.window[1]}")
    lines.append(M.fan.to_text().rstrip("\n"))
    for i in sorted(M.modules):
        m = M.modules[i]
        if m.rank() == 0:
            continue
        lines.append(
            f"module {i}: " + " ".join(str(d) for d in m.degrees)
        )
    for (s, t) in sorted(M.maps):
        pm = M.maps[(s, t)]
        if pm.is_zero():
            continue
        lines.append(f"sign {s} {t}: {M.fan.incidence_sign(s, t):+d}")
        for (i, j) in sorted(pm.entries):
            lines.append(
                f"entry {s} {t} {i} {j}: {format_poly(pm.entries[(i, j)])}"
            )
    return "\n".join(lines) + "\n"


def complex_from_text(text, validate=True):
    """Parse complex_to_text output; signs are recomputed and verified.

    With validate=False the parsed complex is returned without running
    check_complex, so callers can run the certificate suite themselves
    and report failures instead of refusing the file.
    """
    lines = text.splitlines()
    if not lines or lines[0].strip() != FORMAT_LINE:
        raise InputError("missing complex-format header")
    window = None
    fan_lines = []
    module_lines = []
    entry_lines = []
    sign_lines = []
    for raw in lines[1:]:
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("window"):
            parts = line.split()
            window = (int(parts[1]), int(parts[2]))
        elif line.startswith(("dim", "ray", "cone")):
            fan_lines.append(line)
        elif line.startswith("module"):
            module_lines.append(line)
        elif line.startswith("entry"):
            entry_lines.append(line)
        elif line.startswith("sign"):
            sign_lines.append(line)
        else:
            raise InputError(f"unrecognized line: {raw.strip()!r}")
    from fansheaf.fans import parse_fan

    fan, _ = parse_fan("\n".join(fan_lines))
    tower = RingTower(fan)
    modules = {}
    for line in module_lines:
        head, _, body = line.partition(":")
        i = int(head.split()[1])
        degs = [int(t) for t in body.split()]
        if not 0 <= i < len(fan.cones):
            raise InputError(f"module line for unknown cone {i}")
        modules[i] = FreeGradedModule(tower.ring(i), degs)
    entries_by_pair = {}
    for line in entry_lines:
        head, _, body = line.partition(":")
        _, s, t, i, j = head.split()
        s, t, i, j = int(s), int(t), int(i), int(j)
        if s not in modules or t not in modules:
            raise InputError(f"entry for cones without modules: {s}->{t}")
        nv = tower.ring(t).nvars
        entries_by_pair.setdefault((s, t), {})[(i, j)] = parse_poly(body, nv)
    maps = {}
    for (s, t), entries in entries_by_pair.items():
        if not fan.is_facet(t, s):
            raise InputError(f"map {s}->{t}: target is not a facet")
        maps[(s, t)] = PolyMatrix(
            modules[s], modules[t], tower.restriction(s, t), entries
        )
    for line in sign_lines:
        head, _, body = line.partition(":")
        _, s, t = head.split()
        got = int(body)
        want = fan.incidence_sign(int(s), int(t))
        if got != want:
            raise InputError(
                f"sign {s} {t} is {got}, convention gives {want}"
            )
    M = FanComplex(fan, tower, modules, maps, window=window)
    if validate:
        report = check_complex(M)
        if not report.ok:
            raise InputError(
                "serialized complex fails validity: "
                + "; ".join(report.problems)
            )
    return M
