"""Weighted model counting with certified decimal precision.

Counts are evaluated over decision-form formula DAGs using whichever
numeric representation is cheapest for the requested digit guarantee:
an extended-range double, a software float of selectable width,
outward-rounded intervals, or exact rationals.
"""

from .evaluator import (
    DoubleDomain,
    ErdDomain,
    EvalResult,
    IntervalDomain,
    RationalDomain,
    SoftFloatDomain,
    digits_floor,
    error_bound,
    evaluate,
    evaluate_double_baseline,
    hybrid_count,
    select_fraction_width,
)
from .metrics import approx_error, decimal_precision, meets_target, score
from .nnf import NnfDag, model_enumerate, parse_nnf, parse_sexpr, render_nnf, validate
from .weights import WeightMap, build_plan, classify, parse_weights, render_weights

__version__ = "0.1.0"

__all__ = [
    "DoubleDomain",
    "ErdDomain",
    "EvalResult",
    "IntervalDomain",
    "NnfDag",
    "RationalDomain",
    "SoftFloatDomain",
    "WeightMap",
    "approx_error",
    "build_plan",
    "classify",
    "decimal_precision",
    "digits_floor",
    "error_bound",
    "evaluate",
    "evaluate_double_baseline",
    "hybrid_count",
    "meets_target",
    "model_enumerate",
    "parse_nnf",
    "parse_sexpr",
    "parse_weights",
    "render_nnf",
    "render_weights",
    "score",
    "select_fraction_width",
    "validate",
]
