"""Circuit evaluation over interchangeable numeric domains.

One bottom-up pass serves every representation: exact rationals, plain
binary64, the extended-range double, the software float at any width, and
outward-rounded intervals.  On top of that sit the a-priori integer error
bound for nonnegative circuits, fraction-width selection for a target
digit count, and the escalation driver that tries float, then intervals
of increasing width, then exact rationals.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional

from .erd import ErdNumber, erd_add, erd_from_rational, erd_mul2, erd_to_rational
from .interval import (
    Interval,
    iv_add,
    iv_decimal_precision,
    iv_from_rational,
    iv_midpoint,
    iv_mul,
)
from .nnf import AndNode, FalseNode, LitNode, NnfDag, OrNode, TrueNode
from .rational import Rational, check_bit_budget
from .softfloat import (
    NEAREST_EVEN,
    RoundingMode,
    SoftFloat,
    sf_add,
    sf_mul,
    sf_round_from_rational,
    sf_to_rational,
)
from .weights import EvalPlan, WeightMap, build_plan

LOG10_2 = math.log10(2.0)
LOG2_10 = math.log2(10.0)

# exponent-bit margin of Eq-10-style width selection, by bound constant
_WIDTH_MARGIN_RESCALED = 2.9  # covers log2 7
_WIDTH_MARGIN_PLAIN = 2.0  # covers log2 4 exactly

INTERVAL_LADDER = (64, 128, 256)


class BoundUnavailable(ValueError):
    """The a-priori error bound only covers nonnegative constants."""


class RationalDomain:
    """Exact evaluation; optionally enforces a bit ceiling per value."""

    exact = True

    def __init__(self, max_bits: Optional[int] = None):
        self.max_bits = max_bits
        self.tag = "rational"

    def from_rational(self, v: Rational):
        return check_bit_budget(v, self.max_bits)

    def add(self, a, b):
        return check_bit_budget(a + b, self.max_bits)

    def mul(self, a, b):
        return check_bit_budget(a * b, self.max_bits)

    def to_rational(self, v) -> Rational:
        return v


class DoubleDomain:
    """Plain binary64; overflow and underflow are recorded, not raised."""

    exact = False

    def __init__(self):
        self.tag = "double-53"
        self.overflowed = False
        self.underflowed = False

    def from_rational(self, v: Rational):
        try:
            d = float(v)
        except OverflowError:
            self.overflowed = True
            return math.inf if v > 0 else -math.inf
        if d == 0.0 and v != 0:
            self.underflowed = True
        return d

    def add(self, a: float, b: float) -> float:
        r = a + b
        if math.isinf(r) and not (math.isinf(a) or math.isinf(b)):
            self.overflowed = True
        return r

    def mul(self, a: float, b: float) -> float:
        r = a * b
        if math.isinf(r) and not (math.isinf(a) or math.isinf(b)):
            self.overflowed = True
        if r == 0.0 and a != 0.0 and b != 0.0:
            self.underflowed = True
        return r

    def to_rational(self, v: float) -> Rational:
        return Fraction(v)


class ErdDomain:
    """Extended-range double: binary64 rounding, 64-bit exponent range."""

    exact = False

    def __init__(self):
        self.tag = "erd"

    def from_rational(self, v: Rational):
        return erd_from_rational(v)

    def add(self, a: ErdNumber, b: ErdNumber) -> ErdNumber:
        return erd_add(a, b)

    def mul(self, a: ErdNumber, b: ErdNumber) -> ErdNumber:
        return erd_mul2(a, b)

    def to_rational(self, v: ErdNumber) -> Rational:
        return erd_to_rational(v)


class SoftFloatDomain:
    exact = False

    def __init__(self, p: int, mode: RoundingMode = NEAREST_EVEN):
        self.p = p
        self.mode = mode
        self.tag = "softfloat-%d" % p

    def from_rational(self, v: Rational):
        return sf_round_from_rational(v, self.p, self.mode)

    def add(self, a: SoftFloat, b: SoftFloat) -> SoftFloat:
        return sf_add(a, b, self.mode)

    def mul(self, a: SoftFloat, b: SoftFloat) -> SoftFloat:
        return sf_mul(a, b, self.mode)

    def to_rational(self, v: SoftFloat) -> Rational:
        return sf_to_rational(v)


class IntervalDomain:
    exact = False

    def __init__(self, p: int):
        self.p = p
        self.tag = "interval-%d" % p

    def from_rational(self, v: Rational):
        return iv_from_rational(v, self.p)

    def add(self, a: Interval, b: Interval) -> Interval:
        return iv_add(a, b)

    def mul(self, a: Interval, b: Interval) -> Interval:
        return iv_mul(a, b)

    def to_rational(self, v: Interval) -> Rational:
        """Nominal value: the rounded midpoint (negative zero normalizes
        to plain zero by construction)."""
        return sf_to_rational(iv_midpoint(v))


@dataclass
class StageRecord:
    method: str
    accepted: bool
    guaranteed_digits: Optional[float]
    op_count: int
    elapsed: float


@dataclass
class EvalResult:
    value: object
    method: str
    op_count: int
    elapsed: float
    nominal: Optional[Rational]  # reportable value as an exact rational
    exact: Optional[Rational] = None
    guaranteed_digits: Optional[float] = None
    overflow: bool = False
    underflow: bool = False
    stages: List[StageRecord] = field(default_factory=list)


def _reachable(dag: NnfDag) -> List[bool]:
    seen = [False] * len(dag.nodes)
    stack = [dag.root]
    seen[dag.root] = True
    while stack:
        node = dag.nodes[stack.pop()]
        if isinstance(node, (AndNode, OrNode)):
            for c in node.children:
                if not seen[c]:
                    seen[c] = True
                    stack.append(c)
    return seen


def _balanced_sum(domain, terms: list):
    """Sum as a balanced tree of binary additions."""
    ops = 0
    while len(terms) > 1:
        nxt = []
        for i in range(0, len(terms) - 1, 2):
            nxt.append(domain.add(terms[i], terms[i + 1]))
            ops += 1
        if len(terms) % 2:
            nxt.append(terms[-1])
        terms = nxt
    return terms[0], ops


def evaluate(dag: NnfDag, plan: EvalPlan, domain) -> EvalResult:
    """Single bottom-up pass: literals seed with one rounding, conjunctions
    multiply, disjunctions sum their branches after implicit smoothing,
    and the root picks up the plan's correction factors."""
    start = time.perf_counter()
    ops = 0
    seed_cache: dict = {}

    def seed(value: Rational):
        got = seed_cache.get(value)
        if got is None:
            got = domain.from_rational(value)
            seed_cache[value] = got
        return got

    one = seed(Fraction(1))
    zero = seed(Fraction(0))
    reachable = _reachable(dag)
    vals: list = [None] * len(dag.nodes)
    for idx, node in enumerate(dag.nodes):
        if not reachable[idx]:
            continue
        if isinstance(node, LitNode):
            vals[idx] = seed(plan.seed(node.lit))
        elif isinstance(node, TrueNode):
            vals[idx] = one
        elif isinstance(node, FalseNode):
            vals[idx] = zero
        elif isinstance(node, AndNode):
            acc = vals[node.children[0]]
            for c in node.children[1:]:
                acc = domain.mul(acc, vals[c])
                ops += 1
            vals[idx] = acc
        else:
            terms = []
            for c, missing in zip(node.children, node.smoothing_gaps):
                t = vals[c]
                for s in plan.sigma_factors(missing):
                    t = domain.mul(t, seed(s))
                    ops += 1
                terms.append(t)
            total, added = _balanced_sum(domain, terms)
            ops += added
            vals[idx] = total

    result = vals[dag.root]
    for f in plan.root_factors:
        result = domain.mul(result, seed(f))
        ops += 1
    elapsed = time.perf_counter() - start

    try:
        nominal = domain.to_rational(result)
    except (OverflowError, ValueError):
        nominal = None
    return EvalResult(
        value=result,
        method=domain.tag,
        op_count=ops,
        elapsed=elapsed,
        nominal=nominal,
        exact=result if domain.exact else None,
        guaranteed_digits=math.inf if domain.exact else None,
        overflow=getattr(domain, "overflowed", False),
        underflow=getattr(domain, "underflowed", False),
    )


def evaluate_double_baseline(dag: NnfDag, plan: EvalPlan) -> EvalResult:
    """Plain binary64 evaluation; range failures are flagged in the result."""
    return evaluate(dag, plan, DoubleDomain())


def error_bound(dag: NnfDag, plan: EvalPlan) -> int:
    """A-priori units-of-rounding bound e for the evaluation as an
    arithmetic circuit: constants carry one unit, a k-ary product adds
    2(k-1) and the children's units, a k-ary balanced sum adds its tree
    depth ceil(log2 k) over the worst child.

    Only valid when every seeded constant is nonnegative.
    """
    if not plan.all_nonnegative:
        raise BoundUnavailable("error bound requires nonnegative weights")
    reachable = _reachable(dag)
    units = [0] * len(dag.nodes)
    for idx, node in enumerate(dag.nodes):
        if not reachable[idx]:
            continue
        if isinstance(node, (LitNode, TrueNode, FalseNode)):
            units[idx] = 1
        elif isinstance(node, AndNode):
            k = len(node.children)
            units[idx] = 2 * (k - 1) + sum(units[c] for c in node.children)
        else:
            terms = []
            for c, missing in zip(node.children, node.smoothing_gaps):
                extra = len(plan.sigma_factors(missing))
                terms.append(units[c] + 3 * extra)
            k = len(terms)
            depth = (k - 1).bit_length()  # ceil(log2 k)
            units[idx] = depth + max(terms)
    total = units[dag.root]
    m = len(plan.root_factors)
    if m:
        total += 3 * m
    return total


def bound_digits_floor(p: int, bound_units: int) -> float:
    """Digit floor implied by a units bound at width p."""
    if bound_units < 1:
        raise ValueError("bound must be at least one unit")
    return p * LOG10_2 - math.log10(bound_units)


def select_fraction_width(n: int, target_digits: float, rescaled: bool = True) -> int:
    """Smallest production width meeting both selection rules: enough bits
    that the linear error growth stays controlled (p >= 2(1 + log2 n)) and
    enough for the digit target (p >= D log2 10 + log2 n + margin)."""
    n = max(1, n)
    if target_digits < 0:
        raise ValueError("target precision must be nonnegative")
    margin = _WIDTH_MARGIN_RESCALED if rescaled else _WIDTH_MARGIN_PLAIN
    log2n = math.log2(n)
    need = max(2.0 * (1.0 + log2n), target_digits * LOG2_10 + log2n + margin)
    if need <= 53:
        return 53
    return 64 * math.ceil(need / 64.0)


def digits_floor(p: int, n: int, c_mode: str = "rescaled") -> float:
    """Guaranteed digit floor p log10 2 - log10 n - log10 c for nonnegative
    evaluation; c is 7 with rescaling, 4 without, and 3 for a bare product
    of literal weights."""
    c = {"rescaled": 7.0, "plain": 4.0, "product": 3.0}[c_mode]
    return p * LOG10_2 - math.log10(max(1, n)) - math.log10(c)


def _guarantee_floor(plan: EvalPlan, p: int) -> float:
    mode = "rescaled" if plan.any_rescaled else "plain"
    return digits_floor(p, plan.bound_vars, mode)


def hybrid_count(
    dag: NnfDag,
    wm: WeightMap,
    target_digits: float,
    max_width: int = 4096,
    rational_max_bits: Optional[int] = None,
) -> EvalResult:
    """Escalating evaluation that stops at the first stage certifying the
    target digit count.

    Nonnegative weights run one float stage (extended-range double when 53
    bits suffice, otherwise the software float at the selected width) whose
    guarantee needs no oracle.  Mixed weights run up to two interval stages
    of increasing width starting from the selected width, accepting the
    first whose interval certifies the target.  Whatever remains falls to
    exact rationals, where a resource-ceiling failure is terminal.
    """
    plan = build_plan(wm, dag)
    stages: List[StageRecord] = []

    if plan.all_nonnegative:
        p = select_fraction_width(plan.bound_vars, target_digits, plan.any_rescaled)
        if p <= max_width:
            domain = ErdDomain() if p == 53 else SoftFloatDomain(p)
            res = evaluate(dag, plan, domain)
            res.guaranteed_digits = _guarantee_floor(plan, p)
            res.stages = stages + [
                StageRecord(res.method, True, res.guaranteed_digits, res.op_count, res.elapsed)
            ]
            return res
    else:
        start_p = max(64, select_fraction_width(plan.bound_vars, target_digits, True))
        first = next(
            (i for i, q in enumerate(INTERVAL_LADDER) if q >= start_p),
            len(INTERVAL_LADDER) - 1,
        )
        for p in INTERVAL_LADDER[first : first + 2]:
            res = evaluate(dag, plan, IntervalDomain(p))
            digits = iv_decimal_precision(res.value)
            accepted = digits >= target_digits
            stages.append(StageRecord(res.method, accepted, digits, res.op_count, res.elapsed))
            if accepted:
                res.guaranteed_digits = digits
                res.stages = stages
                return res

    res = evaluate(dag, plan, RationalDomain(rational_max_bits))
    res.stages = stages + [
        StageRecord(res.method, True, math.inf, res.op_count, res.elapsed)
    ]
    return res
