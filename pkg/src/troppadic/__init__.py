"""Exact p-adic series calculus and tropical root-count bounds."""

from .errors import (
    BudgetExceeded,
    DivisionByZero,
    DomainViolation,
    FormatError,
    GenericityFailure,
    NotClosedUnderDerivation,
    NotRegular,
    OracleMissing,
    PrecisionExhausted,
    TropPadicError,
    Unbounded,
    ZeroSeries,
)
from .padic import INF, PadicScaled, arith, difference_floor, valuation
from .polyhedra import (
    PolyComplex,
    QPolyhedron,
    convex_hull,
    epsilon_thicken,
    lower_hull,
    minkowski_sum,
    mixed_volume,
    volume,
)
from .series import (
    Budget,
    MonomialRule,
    ParamSeries,
    RestrictedSeries,
    Scale,
    Shift,
    TailBound,
    derivative,
    evaluate,
    regular_order,
    strassmann_count,
    substitute,
    weierstrass_divide,
    weierstrass_prepare,
)
from .tropical import (
    NewtonCell,
    TropCell,
    TropicalData,
    connected_components,
    initial_form,
    shift_trop,
    trop_complex,
    vert_nu,
)
from .bounds import (
    BoundReport,
    WBoundOracle,
    box_E,
    isolated_bounds,
    make_pointed,
    pointed_check,
    stable_multiplicity,
    system_root_bound,
    weierstrass_bound_1_to_n,
)

__all__ = [
    "BoundReport",
    "Budget",
    "BudgetExceeded",
    "DivisionByZero",
    "DomainViolation",
    "FormatError",
    "GenericityFailure",
    "INF",
    "MonomialRule",
    "NewtonCell",
    "NotClosedUnderDerivation",
    "NotRegular",
    "OracleMissing",
    "PadicScaled",
    "ParamSeries",
    "PolyComplex",
    "PrecisionExhausted",
    "QPolyhedron",
    "RestrictedSeries",
    "Scale",
    "Shift",
    "TailBound",
    "TropCell",
    "TropPadicError",
    "TropicalData",
    "Unbounded",
    "WBoundOracle",
    "ZeroSeries",
    "arith",
    "box_E",
    "connected_components",
    "convex_hull",
    "derivative",
    "difference_floor",
    "epsilon_thicken",
    "evaluate",
    "initial_form",
    "isolated_bounds",
    "lower_hull",
    "make_pointed",
    "minkowski_sum",
    "mixed_volume",
    "pointed_check",
    "regular_order",
    "shift_trop",
    "stable_multiplicity",
    "strassmann_count",
    "substitute",
    "system_root_bound",
    "trop_complex",
    "valuation",
    "vert_nu",
    "volume",
    "weierstrass_bound_1_to_n",
    "weierstrass_divide",
    "weierstrass_prepare",
]

__version__ = "0.1.0"
