"""Tropicalization of restricted series.

The complex of a series is computed through the regular subdivision route:
lift the stored support by coefficient valuations, take all faces of the
lower hull, and dualize each face F to the cell of directions whose
weighted minimum is attained exactly on F, clipped to the domain.  Newton
cells are the projected convex hulls of the faces; the two families are
dual (complementary dimensions, orthogonal spans, reversed face order).

Series with a nonempty tail get a per-cell certificate that the tail can
never reach the minimum anywhere on the cell (an exact linear program over
the cell); failure raises PrecisionExhausted rather than guessing.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import PrecisionExhausted, ZeroSeries
from .polyhedra import (
    PolyComplex,
    QPolyhedron,
    convex_hull,
    lower_hull,
    primitive,
    vdot,
)
from .series import RestrictedSeries, scale_variable

F = Fraction


@dataclass(frozen=True)
class TropCell:
    """A cell of directions sharing one weighted-minimum support set."""

    witness: tuple
    vert: frozenset  # of (exponents, valuation)
    cell: QPolyhedron

    def dim(self):
        return self.cell.affine_dim()


@dataclass(frozen=True)
class NewtonCell:
    """Projected hull of a vert set, dual to its TropCell."""

    poly: QPolyhedron
    trop_index: int

    def dim(self):
        return self.poly.affine_dim()


class TropicalData:
    """All cells of one series over its domain, with the dual cells."""

    def __init__(self, series, domain, cells, newton_cells, newton_support):
        self.series = series
        self.domain = domain
        self.cells = list(cells)
        self.newton_cells = list(newton_cells)
        self.newton_support = newton_support
        self.complex = PolyComplex([c.cell for c in self.cells])

    def is_empty(self):
        return not self.cells

    def ray_directions(self):
        dirs = set()
        for c in self.cells:
            for r in c.cell.rays:
                dirs.add(primitive(r))
            for l in c.cell.lines:
                dirs.add(primitive(l))
                dirs.add(primitive(tuple(-x for x in l)))
        return sorted(dirs)

    def vertices(self):
        out = set()
        for c in self.cells:
            if c.cell.affine_dim() == 0:
                out.update(c.cell.vertices)
        return sorted(out)


def _support_items(f: RestrictedSeries):
    return sorted((i, c.valuation()) for i, c in f.terms.items())


def _tail_floor_on_cell(f: RestrictedSeries, cell: QPolyhedron, base_point, base_val):
    """Certified min over the cell of (tail floor at nu) - (cell value at nu).

    Works in (nu, t) with t <= nu_j for all j; the tail floor at nu is
    (cutoff+1) * (slope + t) + offset.  Returns None when unbounded below.
    """
    tail = f.tail
    n = f.nvars
    ineqs = []
    for u, a in cell.ineqs:
        ineqs.append((tuple(u) + (0,), a))
    for j in range(n):
        row = [0] * (n + 1)
        row[j] = -1
        row[n] = 1
        ineqs.append((tuple(row), F(0)))  # t - nu_j <= 0
    lifted = QPolyhedron.from_hrep(ineqs, ambient=n + 1)
    d1 = tail.cutoff + 1
    # objective: d1*t - <base_point, nu>  (linear part)
    obj = tuple(-F(x) for x in base_point) + (F(d1),)
    m, ok = lifted.linear_min(obj)
    if not ok:
        return None
    return m + d1 * tail.slope + tail.offset - base_val


def vert_nu(f: RestrictedSeries, nu):
    """Exact argmin set of v(a_I) + <I, nu> over all exponents."""
    nu = tuple(F(x) for x in nu)
    items = _support_items(f)
    if not items:
        if f.is_certified_zero():
            raise ZeroSeries("zero series has no vert sets")
        raise PrecisionExhausted("no stored terms to minimize over")
    vals = [(v + vdot(i, nu), i, v) for i, v in items]
    m = min(x[0] for x in vals)
    if not f.tail.is_empty:
        floor = f.tail.floor_at(min(nu))
        if floor is None or floor <= m:
            raise PrecisionExhausted(
                "tail bound cannot exclude the minimum at this direction"
            )
    return {(i, v) for val, i, v in vals if val == m}


def initial_form(f: RestrictedSeries, nu) -> RestrictedSeries:
    """Sum of the minimum-attaining terms; a monomial exactly off the complex."""
    vs = vert_nu(f, nu)
    return RestrictedSeries(
        f.p, f.nvars, {i: f.terms[i] for i, _ in vs}, domain=f.domain
    )


def is_in_tropicalization(f: RestrictedSeries, nu) -> bool:
    return len(vert_nu(f, nu)) >= 2


def trop_complex(f: RestrictedSeries, domain=None) -> TropicalData:
    """The full cell complex of the series over its domain."""
    if f.is_certified_zero():
        raise ZeroSeries("the zero series has no tropicalization")
    if not f.terms:
        raise PrecisionExhausted("no stored terms")
    if domain is None:
        domain = f.domain
    items = _support_items(f)
    n = f.nvars
    if len(items) == 1:
        return TropicalData(f, domain, [], [], None)

    faces = lower_hull(items)
    unclipped = all(r is None for r in domain)
    cells = []
    for face in faces:
        if len(face.points) < 2:
            continue
        pts = [(tuple(int(x) for x in q), h) for q, h in face.points]
        base_pt, base_val = pts[0]
        inside = {q for q, _ in pts}
        if unclipped:
            cell = face.cell
            witness = face.witness
            vert = frozenset(
                (q, h) for q, h in ((tuple(int(x) for x in a), b) for a, b in face.points)
            )
        else:
            clip = []
            for j, r in enumerate(domain):
                if r is None:
                    continue
                row = [0] * n
                row[j] = -1
                clip.append((tuple(row), -F(r)))
            cell = QPolyhedron.from_hrep(
                tuple(face.cell.ineqs) + tuple(clip), ambient=n
            )
            if cell.is_empty():
                continue
            witness = cell.relint_point()
            vert = frozenset(vert_nu(f, witness))
            if {i for i, _ in vert} != inside:
                continue  # the clipped remnant belongs to a finer cell
        if not f.tail.is_empty:
            margin = _tail_floor_on_cell(f, cell, base_pt, base_val)
            if margin is None or margin <= 0:
                raise PrecisionExhausted(
                    "tail bound cannot be excluded over a cell", floor=margin
                )
        cells.append(TropCell(witness, vert, cell))

    cells.sort(key=lambda c: c.witness)
    newton_cells = []
    support_pts = set()
    for k, c in enumerate(cells):
        proj = [i for i, _ in c.vert]
        support_pts.update(proj)
        newton_cells.append(NewtonCell(convex_hull(proj), k))
    support = convex_hull(sorted(support_pts)) if support_pts else None
    return TropicalData(f, domain, cells, newton_cells, support)


def shift_trop(f: RestrictedSeries, t, direction) -> RestrictedSeries:
    """Coefficient-valuation bookkeeping moving the complex by t*direction."""
    t = F(t)
    out = f
    for i, vi in enumerate(direction):
        if vi:
            out = scale_variable(out, i, t * vi)
    return out


def connected_components(datas, domain=None):
    """Components of the intersection of several tropicalizations.

    Returns a list of components, each a list of nonempty intersection
    pieces (one cell from each complex, intersected), grouped by exact
    topological connectivity.
    """
    from itertools import product as iproduct

    cell_lists = [d.cells for d in datas]
    if any(not cl for cl in cell_lists):
        return []
    pieces = []
    for combo in iproduct(*cell_lists):
        if any(
            combo[i].cell.surely_disjoint_from(combo[j].cell)
            for i in range(len(combo))
            for j in range(i + 1, len(combo))
        ):
            continue
        inter = combo[0].cell
        for c in combo[1:]:
            inter = inter.intersection(c.cell)
            if inter.is_empty():
                break
        if domain is not None and not inter.is_empty():
            inter = inter.intersection(domain)
        if not inter.is_empty():
            pieces.append(inter)
    pieces.sort(key=lambda p: p.key())
    # drop exact duplicates to keep the union-find small
    uniq = []
    for p in pieces:
        if not any(p.key() == q.key() for q in uniq):
            uniq.append(p)
    parent = list(range(len(uniq)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(uniq)):
        for j in range(i + 1, len(uniq)):
            if find(i) == find(j):
                continue
            if uniq[i].surely_disjoint_from(uniq[j]):
                continue
            if not uniq[i].intersection(uniq[j]).is_empty():
                parent[find(i)] = find(j)
    groups = {}
    for i in range(len(uniq)):
        groups.setdefault(find(i), []).append(uniq[i])
    return [groups[k] for k in sorted(groups, key=lambda k: uniq[k].key())]


# ---------------------------------------------------------------------------
# deterministic SVG rendering (planar series only)


def _fmt(x):
    return f"{float(x):.3f}"


def _map_factory(xs, ys, size, margin):
    xmin, xmax = min(xs), max(xs)
    ymin, ymax = min(ys), max(ys)
    span = max(xmax - xmin, ymax - ymin, F(1))
    scale = F(size - 2 * margin) / span

    def mp(pt):
        px = margin + (pt[0] - xmin) * scale
        py = size - margin - (pt[1] - ymin) * scale  # y axis up
        return _fmt(px), _fmt(py)

    return mp


def render_svg(data: TropicalData, size=600) -> str:
    """Two fixed panels: the trop cells and the Newton cells, labeled in
    cell order.  Byte-deterministic for a given complex."""
    if data.series.nvars != 2:
        raise ValueError("SVG rendering is planar only")
    margin = 40
    ray_len = F(3)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{2 * size}" '
        f'height="{size}" viewBox="0 0 {2 * size} {size}">'
    ]

    # panel 1: tropical cells
    xs, ys = [F(0)], [F(0)]
    segs, dots, labels = [], [], []
    for k, c in enumerate(data.cells):
        poly = c.cell
        pts = list(poly.vertices)
        xs += [p[0] for p in pts]
        ys += [p[1] for p in pts]
        for r in poly.rays:
            for v in pts:
                end = (v[0] + ray_len * r[0], v[1] + ray_len * r[1])
                xs.append(end[0])
                ys.append(end[1])
    mp = _map_factory(xs, ys, size, margin)
    for k, c in enumerate(data.cells):
        poly = c.cell
        name = f"g{k + 1}"
        if poly.affine_dim() == 0:
            v = poly.vertices[0]
            dots.append(v)
            labels.append((v, name))
        else:
            vs = list(poly.vertices)
            if len(vs) == 2:
                segs.append((vs[0], vs[1]))
                mid = ((vs[0][0] + vs[1][0]) / 2, (vs[0][1] + vs[1][1]) / 2)
                labels.append((mid, name))
            for r in poly.rays:
                for v in vs:
                    end = (v[0] + ray_len * r[0], v[1] + ray_len * r[1])
                    segs.append((v, end))
                    labels.append((end, name))
            for l in poly.lines:
                for v in vs:
                    a = (v[0] - ray_len * l[0], v[1] - ray_len * l[1])
                    b = (v[0] + ray_len * l[0], v[1] + ray_len * l[1])
                    segs.append((a, b))
                    labels.append((b, name))
    parts.append('<g id="trop">')
    for a, b in segs:
        (x1, y1), (x2, y2) = mp(a), mp(b)
        parts.append(
            f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" '
            f'stroke="black" stroke-width="1.5"/>'
        )
    for v in dots:
        x, y = mp(v)
        parts.append(f'<circle cx="{x}" cy="{y}" r="3" fill="black"/>')
    for pt, name in labels:
        x, y = mp(pt)
        parts.append(f'<text x="{x}" y="{y}" font-size="14">&#947;{name[1:]}</text>')
    parts.append("</g>")

    # panel 2: Newton cells
    xs2, ys2 = [F(0)], [F(0)]
    for nc in data.newton_cells:
        xs2 += [p[0] for p in nc.poly.vertices]
        ys2 += [p[1] for p in nc.poly.vertices]
    mp2 = _map_factory(xs2, ys2, size, margin)

    def shift(sxy):
        return str(float(sxy[0]) + size), sxy[1]

    parts.append('<g id="newton">')
    if data.newton_support is not None and data.newton_support.affine_dim() == 2:
        cyc = _polygon_cycle(data.newton_support)
        path = " ".join(
            ("M" if i == 0 else "L") + f"{shift(mp2(p))[0]},{shift(mp2(p))[1]}"
            for i, p in enumerate(cyc)
        )
        parts.append(f'<path d="{path} Z" fill="#dddddd" stroke="none"/>')
    for k, nc in enumerate(data.newton_cells):
        vs = list(nc.poly.vertices)
        if nc.poly.affine_dim() >= 1:
            cyc = _polygon_cycle(nc.poly) if nc.poly.affine_dim() == 2 else vs
            m = len(cyc)
            for i in range(m if nc.poly.affine_dim() == 2 else m - 1):
                a, b = cyc[i], cyc[(i + 1) % m]
                (x1, y1), (x2, y2) = shift(mp2(a)), shift(mp2(b))
                parts.append(
                    f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" '
                    f'stroke="black" stroke-width="1"/>'
                )
        cx = sum(p[0] for p in vs) / len(vs)
        cy = sum(p[1] for p in vs) / len(vs)
        x, y = shift(mp2((cx, cy)))
        parts.append(
            f'<text x="{x}" y="{y}" font-size="14">&#947;&#780;{k + 1}</text>'
        )
    parts.append("</g>")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _polygon_cycle(poly: QPolyhedron):
    """Vertices of a planar polygon in cyclic order."""
    vs = sorted(poly.vertices)
    if len(vs) <= 2:
        return vs
    cx = sum(v[0] for v in vs) / len(vs)
    cy = sum(v[1] for v in vs) / len(vs)

    def half(v):
        dx, dy = v[0] - cx, v[1] - cy
        return 0 if (dy, dx) > (0, 0) else 1

    # sort by angle around the centroid using exact cross products
    import functools

    def cross(a, b):
        return (a[0] - cx) * (b[1] - cy) - (a[1] - cy) * (b[0] - cx)

    def compare(a, b):
        ha, hb = half(a), half(b)
        if ha != hb:
            return -1 if ha < hb else 1
        c = cross(a, b)
        return -1 if c > 0 else (1 if c < 0 else 0)

    return sorted(vs, key=functools.cmp_to_key(compare))
