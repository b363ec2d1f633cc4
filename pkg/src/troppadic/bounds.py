"""The effective root-count pipeline.

Uniform bounds flow from one computable ingredient: for every (slice of a)
parameterized series, an integer d such that all coefficient functions of
X-degree >= d are combinations of lower ones with p-small series weights.
From d the recursive box E(f) confines every specialized Newton support;
boxes give the isolated bounds D1 (a cap on codimension-one cells) and
D2 = E^n (a cap on per-point multiplicities), and the stable-intersection
sum S(f) = sum over components of i(C, ...) gives the reported bound, with
T = T1*T2 as a box-only cross-check.

Mixed volumes enter in coefficient (unnormalized) mode throughout, the
larger of the two readings, so every reported bound stays sound under
either normalization convention.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import GenericityFailure, OracleMissing
from .padic import PadicScaled
from .polyhedra import _row_reduce, convex_hull, epsilon_thicken, mixed_volume
from .series import ParamSeries, RestrictedSeries, shift_variable
from .tropical import connected_components, trop_complex, vert_nu

F = Fraction


# ---------------------------------------------------------------------------
# the finite-generation oracle


def _series_as_vector(s: RestrictedSeries):
    """Exact rational monomial vector of a polynomial coefficient series."""
    if not s.tail.is_empty:
        return None
    out = {}
    for exps, c in s.terms.items():
        if not c.is_exact:
            return None
        out[exps] = c.rational_value()
    return out


def _solve_small_combination(target, basis, p):
    """Constants c_J with target = sum c_J basis_J and v(c_J) >= 1, or None.

    A verified constant witness family is in particular a p-small series
    witness family, so success certifies the finite-generation property.
    """
    if not target:
        return {}
    if not basis:
        return None
    keys = sorted(set(target) | {k for b in basis for k in b})
    rows = [[b.get(k, F(0)) for b in basis] + [target.get(k, F(0))] for k in keys]
    ncols = len(basis)
    rank, pivots, rref = _row_reduce(rows)
    # inconsistent iff a pivot lands in the augmented column
    if ncols in pivots:
        return None
    sol = [F(0)] * ncols
    for i, c in enumerate(pivots):
        sol[c] = rref[i][ncols]
    for c in sol:
        if c != 0:
            num, den = c.numerator, c.denominator
            v = 0
            x = abs(num)
            while x % p == 0:
                x //= p
                v += 1
            x = den
            while x % p == 0:
                x //= p
                v -= 1
            if v < 1:
                return None
    return dict(zip(range(ncols), sol))


class WBoundOracle:
    """Certified finite-generation constants d(.), registered or computed.

    The computed route verifies, over the stored coefficients of a series
    polynomial in X, that every coefficient of X-degree >= d is a constant
    combination of lower ones with weights in p*Zp; that witness family
    satisfies the required smallness outright.
    """

    def __init__(self):
        self._registered = {}

    def register(self, key, d: int):
        if d < 1:
            raise ValueError("d must be >= 1")
        self._registered[key] = d

    def d_for(self, ps: ParamSeries) -> int:
        key = ps.canonical_key()
        if key in self._registered:
            return self._registered[key]
        d = self.compute_d(ps)
        if d is None:
            raise OracleMissing(
                "no registered constant and the representation is not verifiable"
            )
        return d

    def compute_d(self, ps: ParamSeries):
        if ps.is_identically_zero():
            return 1
        vectors = {}
        for exps, s in ps.coeffs.items():
            vec = _series_as_vector(s)
            if vec is None:
                return None
            vectors[exps] = vec
        degrees = sorted({sum(i) for i in vectors})
        maxdeg = degrees[-1]
        for d in range(1, maxdeg + 2):
            low = [v for i, v in vectors.items() if sum(i) < d]
            ok = True
            for i, v in vectors.items():
                if sum(i) < d:
                    continue
                if _solve_small_combination(v, low, ps.p) is None:
                    ok = False
                    break
            if ok:
                return d
        return maxdeg + 1


def weierstrass_bound_1_to_n(f: ParamSeries, oracle: WBoundOracle) -> int:
    """The n-variable bound D(f) = d(f) + 1 derived from the oracle constant.

    An identically zero series is flagged with the convention D = 1.
    """
    if f.is_identically_zero():
        return 1
    return oracle.d_for(f) + 1


def monomial_order_bound(exps, d: int) -> int:
    """The regularity order the base-d monomial substitution certifies."""
    n = len(exps)
    return sum(exps[i] * d ** (n - 1 - i) for i in range(n))


# ---------------------------------------------------------------------------
# boxes and isolated bounds


def box_E(f: ParamSeries, oracle: WBoundOracle) -> int:
    """The recursive box bound: every specialized Newton support lies in
    B_max(E(f)) unless the specialization vanishes identically."""
    if f.is_identically_zero():
        return 1
    d = oracle.d_for(f)
    n = f.nx
    if n == 1:
        return d
    e_prime = d
    sub = []
    for k in range(n):
        for s in range(1, d + 1):
            fsk = f.slice_at_zero(s, k)
            if fsk.is_identically_zero():
                continue
            e_prime = max(e_prime, oracle.d_for(fsk))
            if n > 2:
                sub.append(box_E(fsk, oracle))
    if n == 2:
        return e_prime
    return max([e_prime] + sub)


def max_codim1_cells(e: int, n: int) -> int:
    """How many codimension-one cells a complex with Newton support inside
    B_max(e) can have: the interval count in one variable, the Euler count
    of a maximal subdivision of the full box in two, and the coarse
    lattice-point bound above."""
    if n == 1:
        return e
    if n == 2:
        interior = (e - 1) ** 2
        boundary = 4 * e
        return 3 * interior + 2 * boundary - 3
    return (e + 1) ** n


def isolated_bounds(system, oracle: WBoundOracle):
    """(D1, D2): caps on isolated intersection points and on the number of
    roots above each, from the boxes alone."""
    es = [box_E(f, oracle) for f in system]
    n = system[0].nx
    e = max(es)
    d2 = e ** n
    d1 = math.prod(max_codim1_cells(ei, n) for ei in es)
    return d1, d2


# ---------------------------------------------------------------------------
# pointedness


def support_intersection(system):
    common = None
    for f in system:
        s = set(f.terms)
        common = s if common is None else (common & s)
    return common or set()


def pointed_check(system) -> bool:
    """Is the convex closure of the common support full-dimensional?"""
    common = support_intersection(system)
    if not common:
        return False
    n = system[0].nvars
    return convex_hull(sorted(common)).affine_dim() == n


def _variable_occurs(f: RestrictedSeries, i: int) -> bool:
    if not f.tail.is_empty:
        return True  # unknown tail terms may involve any variable
    return any(exps[i] > 0 for exps in f.terms)


@dataclass
class PointedTranscript:
    unit_factors: list = field(default_factory=list)  # (series, variable, s)
    shift_t: int = None
    shift_z: list = None


def make_pointed(system, rng, t_default=16, max_redraws=8):
    """Transform the system until the common support is pointed.

    Missing variables are fixed by unit factors (1 + p^s X_i); if the
    common support still isn't full-dimensional, every variable is shifted
    X_i -> X_i - p^t z_i with fresh units z_i, which fills the supports
    downward while preserving the relevant root counts.
    """
    p = system[0].p
    n = system[0].nvars
    rmins = [r for f in system for r in f.domain if r is not None]
    s_exp = max(1, math.ceil(1 - min(rmins))) if rmins else 1
    transcript = PointedTranscript()
    out = list(system)
    for j, f in enumerate(out):
        for i in range(n):
            if not _variable_occurs(f, i):
                factor = RestrictedSeries(
                    p,
                    n,
                    {
                        (0,) * n: 1,
                        tuple(1 if k == i else 0 for k in range(n)): p ** s_exp,
                    },
                    domain=f.domain,
                )
                out[j] = out[j] * factor
                transcript.unit_factors.append((j, i, s_exp))
    if pointed_check(out):
        return out, transcript
    t = t_default
    for attempt in range(max_redraws):
        zs = [rng.randrange(1, p) for _ in range(n)]
        shifted = out
        for i in range(n):
            c = PadicScaled.exact(p, zs[i] * p ** t)
            shifted = [shift_variable(f, i, c) for f in shifted]
        if pointed_check(shifted):
            transcript.shift_t = t
            transcript.shift_z = zs
            return shifted, transcript
        if attempt % 2 == 1:
            t += t_default
    raise GenericityFailure("could not make the common support pointed")


# ---------------------------------------------------------------------------
# stable multiplicities


def _dual_polytope(f: RestrictedSeries, nu):
    vs = vert_nu(f, nu)
    return convex_hull(sorted(i for i, _ in vs))


@dataclass
class MultiplicityTranscript:
    epsilon: Fraction = None
    thicken: Fraction = None
    shift_vectors: list = None
    points: list = field(default_factory=list)  # (nu, mv)


def _as_int(mv) -> int:
    mv = F(mv)
    if mv.denominator != 1:
        raise AssertionError(f"mixed volume of lattice duals must be integral, got {mv}")
    return int(mv)


def stable_multiplicity(fs, datas, component, rng, others=(), max_retries=32):
    """i(C, Trop(f_1)...Trop(f_n)) for one connected component.

    An isolated point contributes the coefficient-mode mixed volume of the
    dual cells directly.  A positive-dimensional component is thickened
    (shrinking until the thickening separates it from every other
    component), then the complexes are shifted by eps*v_i until every
    intersection surviving inside the thickening is a transverse point in
    its interior coming from one of the component's own pieces.
    """
    n = fs[0].nvars
    transcript = MultiplicityTranscript()
    if component and all(p.affine_dim() == 0 for p in component):
        points = sorted({p.vertices[0] for p in component})
        if len(points) == 1:
            nu = points[0]
            duals = [_dual_polytope(f, nu) for f in fs]
            mv = _as_int(mixed_volume(duals))
            transcript.epsilon = F(0)
            transcript.points.append((nu, mv))
            return mv, transcript

    eps0 = F(1, 2)
    for _ in range(24):
        thick = [epsilon_thicken(piece, eps0) for piece in component]
        if all(
            other.intersection(tp).is_empty()
            for other in others
            for tp in thick
        ):
            break
        eps0 /= 2
    else:
        raise GenericityFailure("cannot separate the component by thickening")

    from itertools import product as iproduct

    cell_lists = [[c.cell for c in d.cells] for d in datas]

    def chain_intersect(cells):
        for i in range(len(cells)):
            for j in range(i + 1, len(cells)):
                if cells[i].surely_disjoint_from(cells[j]):
                    return None
        inter = cells[0]
        for c in cells[1:]:
            inter = inter.intersection(c)
            if inter.is_empty():
                return None
        return inter

    own_combos = set()
    for combo_idx in iproduct(*(range(len(cl)) for cl in cell_lists)):
        inter = chain_intersect([cell_lists[i][ci] for i, ci in enumerate(combo_idx)])
        if inter is None:
            continue
        if any(not inter.intersection(tp).is_empty() for tp in thick):
            own_combos.add(combo_idx)

    q = 2 ** 18  # keep eps*v_i small from the first attempt
    for attempt in range(max_retries):
        vs = [tuple(rng.randrange(1, 2 ** 16) for _ in range(n)) for _ in fs]
        eps = F(1, q)
        shifted = [
            [cell.translate(tuple(eps * x for x in v)) for cell in cl]
            for cl, v in zip(cell_lists, vs)
        ]
        ok = True
        found = {}
        for combo_idx in iproduct(*(range(len(cl)) for cl in cell_lists)):
            inter = chain_intersect([shifted[i][ci] for i, ci in enumerate(combo_idx)])
            if inter is None:
                continue
            for piece in thick:
                y = inter.intersection(piece)
                if y.is_empty():
                    continue
                if y.affine_dim() > 0 or combo_idx not in own_combos:
                    ok = False
                    break
                pt = y.vertices[0]
                if not any(tp.contains_strictly(pt) for tp in thick):
                    ok = False
                    break
                found[pt] = True
            if not ok:
                break
        if ok:
            total = 0
            points = []
            for pt in sorted(found):
                duals = []
                generic = True
                for f, v in zip(fs, vs):
                    back = tuple(x - eps * w for x, w in zip(pt, v))
                    dual = _dual_polytope(f, back)
                    if dual.affine_dim() != 1:
                        generic = False
                        break
                    duals.append(dual)
                if not generic:
                    ok = False
                    break
                mv = _as_int(mixed_volume(duals))
                total += mv
                points.append((pt, mv))
            if ok:
                transcript.epsilon = eps
                transcript.thicken = eps0
                transcript.shift_vectors = vs
                transcript.points = points
                return total, transcript
        q *= 2
    raise GenericityFailure(
        f"no transverse shift found after {max_retries} retries"
    )


# ---------------------------------------------------------------------------
# the full pipeline


@dataclass
class BoundReport:
    """The audit trail of one system bound."""

    prime: int
    nvars: int
    seed: object
    e_boxes: list
    d1: int
    d2: int
    t1: int
    t2: int
    t_cross: int
    s_bound: int
    components: list
    transforms: dict
    cross_check_ok: bool
    normalization: str = "coefficient"
    schema_version: int = 1

    def to_dict(self):
        return {
            "schema_version": self.schema_version,
            "prime": self.prime,
            "nvars": self.nvars,
            "seed": self.seed,
            "normalization": self.normalization,
            "e_boxes": list(self.e_boxes),
            "d1": self.d1,
            "d2": self.d2,
            "t1": self.t1,
            "t2": self.t2,
            "t_cross": self.t_cross,
            "s_bound": self.s_bound,
            "sum_multiplicities": self.s_bound,
            "cross_check_ok": self.cross_check_ok,
            "components": self.components,
            "transforms": self.transforms,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


def _frac_str(x) -> str:
    x = F(x)
    return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)


def system_root_bound(system, oracle: WBoundOracle, seed, ys=(), domain=None, jobs=1):
    """Run the whole pipeline on an n x n system of parameterized series.

    Returns a BoundReport whose s_bound dominates the number of roots with
    all coordinate valuations in the domain, whenever that number is
    finite; an infinite solution set is not detected.  ``jobs`` bounds the
    per-component worker pool; results are order-stable either way.
    """
    n = system[0].nx
    if len(system) != n:
        raise ValueError("need n series in n variables")
    p = system[0].p
    if domain is None:
        domain = (None,) * n
    rng = random.Random(f"{seed}|pointed")
    fs = [ps.specialize(ys, x_domain=domain) for ps in system]
    fs, pointed_transcript = make_pointed(fs, rng)
    transformed = [ParamSeries.from_series(f) for f in fs]
    es = [box_E(f, oracle) for f in transformed]
    e = max(es)
    d1, d2 = isolated_bounds(transformed, oracle)
    t1 = d1
    t2 = math.factorial(n) * e ** n
    t_cross = t1 * t2

    datas = [trop_complex(f) for f in fs]
    comps = connected_components(datas)

    def run_component(idx):
        crng = random.Random(f"{seed}|component|{idx}")
        others = [piece for j, c in enumerate(comps) if j != idx for piece in c]
        return stable_multiplicity(fs, datas, comps[idx], crng, others=others)

    if jobs > 1 and len(comps) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run_component, range(len(comps))))
    else:
        results = [run_component(i) for i in range(len(comps))]

    total = 0
    comp_records = []
    for idx, (mult, tr) in enumerate(results):
        total += mult
        comp_records.append(
            {
                "index": idx,
                "multiplicity": mult,
                "epsilon": _frac_str(tr.epsilon) if tr.epsilon is not None else None,
                "thickening": _frac_str(tr.thicken) if tr.thicken is not None else None,
                "shift_vectors": [list(v) for v in tr.shift_vectors]
                if tr.shift_vectors
                else None,
                "points": [
                    {"nu": [_frac_str(x) for x in pt], "mv": mv}
                    for pt, mv in tr.points
                ],
                "pieces": len(comps[idx]),
            }
        )
    transforms = {
        "unit_factors": [
            {"series": j, "variable": i, "s": s}
            for j, i, s in pointed_transcript.unit_factors
        ],
        "shift": None
        if pointed_transcript.shift_t is None
        else {"t": pointed_transcript.shift_t, "z": pointed_transcript.shift_z},
    }
    return BoundReport(
        prime=p,
        nvars=n,
        seed=seed,
        e_boxes=es,
        d1=d1,
        d2=d2,
        t1=t1,
        t2=t2,
        t_cross=t_cross,
        s_bound=total,
        components=comp_records,
        transforms=transforms,
        cross_check_ok=(total <= t_cross),
    )
