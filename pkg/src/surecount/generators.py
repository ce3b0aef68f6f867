"""Reproducible benchmark instances: adversarial formulas and random
weight families.

All randomness flows through SplitMix64 (documented constants below), so
identical (family, size, seed) triples produce byte-identical files on
any platform; no libm calls enter any draw.  Weight magnitudes are built
from integer draws and rendered as exact decimals.

Draw orders, per variable in ascending order:
  uniform+       one magnitude draw k in [1, 10^9 - 1]; w(x) = k / 10^9,
                 w(!x) = 1 - w(x)
  exponential+   two magnitude draws (positive then negative polarity)
  uniform-mixed  magnitude then sign, positive then negative polarity
  expon-mixed    magnitude then sign, positive then negative polarity
  limits-mixed   magnitude then sign for both polarities, redrawn as a
                 pair until the two weights do not cancel

"Exponential" magnitudes are spread across decades: a uniform decade
exponent in [-9, 8] plus a uniform mantissa in [1, 10), quantized to nine
digits right of the decimal point.  That keeps the huge dynamic range of
the published family while staying integer-exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

from .metrics import decimal_precision
from .nnf import AndNode, LitNode, NnfDag, OrNode, TrueNode, compute_varsets
from .rational import Rational
from .softfloat import NEAREST_EVEN, sf_mul, sf_round_from_rational, sf_to_rational

_MASK64 = (1 << 64) - 1

WEIGHT_FAMILIES = (
    "uniform+",
    "exponential+",
    "uniform+-",
    "exponential+-",
    "limits+-",
)

MIXED_FAMILIES = ("uniform+-", "exponential+-", "limits+-")


class SplitMix64:
    """SplitMix64 stream: state += 0x9E3779B97F4A7C15, output mixed with
    the 0xBF58476D1CE4E5B9 / 0x94D049BB133111EB constants."""

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi], rejection-sampled so it is unbiased."""
        span = hi - lo + 1
        limit = (1 << 64) - ((1 << 64) % span)
        while True:
            v = self.next_u64()
            if v < limit:
                return lo + v % span

    def coin(self) -> bool:
        return bool(self.next_u64() & 1)

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randint(0, i)
            items[i], items[j] = items[j], items[i]


@dataclass(frozen=True)
class GenSpec:
    family: str
    n: int
    seed: int = 0
    node_budget: int = 60
    product_w: Optional[Rational] = None


def generate(spec: GenSpec):
    """Dispatch a GenSpec to its family: returns (dag or None, weights or
    None).  Identical specs produce identical objects byte-for-byte once
    rendered."""
    if spec.family in WEIGHT_FAMILIES:
        return None, gen_weights(spec.family, spec.n, spec.seed)
    if spec.family == "tau":
        return gen_tau(spec.n)
    if spec.family == "product":
        w = spec.product_w if spec.product_w is not None else Fraction(1, 2)
        return gen_product(spec.n, w)
    if spec.family == "ddnnf":
        return gen_random_ddnnf(spec.n, spec.node_budget, spec.seed), None
    raise ValueError("unknown family %r" % spec.family)


def _nine_digit(k: int) -> Rational:
    return Fraction(k, 10**9)


def _uniform_nine_digit(rng: SplitMix64) -> Rational:
    """9-digit decimal uniform in [10^-9, 1 - 10^-9]."""
    return _nine_digit(rng.randint(1, 10**9 - 1))


def _spread_magnitude(rng: SplitMix64) -> Rational:
    """Magnitude across [10^-9, 10^9]: uniform decade, uniform mantissa,
    quantized to nine digits right of the point.  Integer-only math."""
    decade = rng.randint(-9, 8)
    mantissa_bits = rng.randint(0, (1 << 53) - 1)
    # value = (1 + 9 * mantissa_bits / 2^53) * 10^decade, then quantize
    scaled = ((1 << 53) + 9 * mantissa_bits) * 10 ** (decade + 9)
    k = (scaled + (1 << 52)) >> 53  # round half up
    return _nine_digit(max(1, k))


def _limits_magnitude(rng: SplitMix64) -> Rational:
    return Fraction(10**9) if rng.coin() else Fraction(1, 10**9)


def _signed(rng: SplitMix64, magnitude: Rational) -> Rational:
    return -magnitude if rng.coin() else magnitude


def gen_weights(family: str, num_vars: int, seed: int):
    """Weight map for one of the named families over variables 1..num_vars."""
    from .weights import WeightMap

    if family not in WEIGHT_FAMILIES:
        raise ValueError("unknown weight family %r" % family)
    rng = SplitMix64(seed)
    wm = WeightMap()
    for var in range(1, num_vars + 1):
        if family == "uniform+":
            w = _uniform_nine_digit(rng)
            wm.declare(var, w)
            wm.declare(-var, 1 - w)
        elif family == "exponential+":
            wm.declare(var, _spread_magnitude(rng))
            wm.declare(-var, _spread_magnitude(rng))
        elif family == "uniform+-":
            wm.declare(var, _signed(rng, _uniform_nine_digit(rng)))
            wm.declare(-var, _signed(rng, _uniform_nine_digit(rng)))
        elif family == "exponential+-":
            wm.declare(var, _signed(rng, _spread_magnitude(rng)))
            wm.declare(-var, _signed(rng, _spread_magnitude(rng)))
        else:  # limits+-
            while True:
                pos = _signed(rng, _limits_magnitude(rng))
                neg = _signed(rng, _limits_magnitude(rng))
                if pos + neg != 0:
                    break
            wm.declare(var, pos)
            wm.declare(-var, neg)
    return wm


class _Builder:
    def __init__(self):
        self.nodes: list = []
        self._lit_ids: dict = {}
        self._true_id: Optional[int] = None

    def add(self, node) -> int:
        self.nodes.append(node)
        return len(self.nodes) - 1

    def true(self) -> int:
        if self._true_id is None:
            self._true_id = self.add(TrueNode())
        return self._true_id

    def lit(self, lit: int) -> int:
        got = self._lit_ids.get(lit)
        if got is None:
            got = self.add(LitNode(lit))
            self._lit_ids[lit] = got
        return got

    def conj(self, ids: Sequence[int]) -> int:
        ids = tuple(ids)
        if len(ids) == 1:
            return ids[0]
        return self.add(AndNode(ids))

    def decide(self, var: int, left: int, right: int) -> int:
        return self.add(OrNode((left, right), var))

    def dag(self, root: int, num_vars: int, meta: Optional[dict] = None) -> NnfDag:
        return compute_varsets(NnfDag(self.nodes, root, num_vars, meta or {}))


def gen_tau(n: int):
    """The cancellation ladder formula over n + 1 variables.

    Variable 1 carries weights +1 / -1; variables 2..n+1 carry 10^9 on the
    positive and 10^-9 on the negative literal.  The exact count is
    10^(-9n) while the evaluation walks through magnitudes near 10^(+9n),
    so fixed-width floats lose roughly 18n digits to cancellation.
    """
    from .weights import WeightMap

    if n < 1:
        raise ValueError("need at least one chained variable")
    b = _Builder()
    xs = [b.lit(i + 1) for i in range(1, n + 1)]
    nxs = [b.lit(-(i + 1)) for i in range(1, n + 1)]
    all_pos = b.conj(xs)
    all_neg = b.conj(nxs)
    inner = b.decide(2, all_pos, all_neg)
    left = b.conj([b.lit(1), inner])
    right = b.conj([b.lit(-1), all_pos])
    root = b.decide(1, left, right)
    dag = b.dag(root, n + 1, {"family": "tau"})

    wm = WeightMap()
    wm.declare(1, Fraction(1))
    wm.declare(-1, Fraction(-1))
    for var in range(2, n + 2):
        wm.declare(var, Fraction(10**9))
        wm.declare(-var, Fraction(1, 10**9))
    return dag, wm


def gen_product(n: int, w: Rational):
    """Bare conjunction of n positive literals, every one weighted w."""
    from .weights import WeightMap

    if n < 1:
        raise ValueError("need at least one literal")
    b = _Builder()
    root = b.conj([b.lit(v) for v in range(1, n + 1)])
    dag = b.dag(root, n, {"family": "product"})
    wm = WeightMap()
    for var in range(1, n + 1):
        wm.declare(var, Fraction(w))
    return dag, wm


def product_weight(k: int) -> Rational:
    """The swept weight 1 + k * 10^-9."""
    return Fraction(10**9 + k, 10**9)


def product_precision(n: int, w: Rational, p: int) -> float:
    """Digits of agreement between the sequential p-bit product of n copies
    of w and the exact power."""
    seedval = sf_round_from_rational(Fraction(w), p, NEAREST_EVEN)
    acc = seedval
    for _ in range(n - 1):
        acc = sf_mul(acc, seedval, NEAREST_EVEN)
    exact = Fraction(w) ** n
    return decimal_precision(sf_to_rational(acc), exact)


def optimize_product(n: int, p: int, ks: Iterable[int] = range(1, 1001)):
    """Sweep candidate weights 1 + k * 10^-9 and keep the one that makes
    the p-bit product least precise.  Returns (weight, digits, table)."""
    table: List[Tuple[int, float]] = []
    worst_k, worst_digits = None, None
    for k in ks:
        digits = product_precision(n, product_weight(k), p)
        table.append((k, digits))
        if worst_digits is None or digits < worst_digits:
            worst_k, worst_digits = k, digits
    if worst_k is None:
        raise ValueError("empty candidate sweep")
    return product_weight(worst_k), worst_digits, table


def gen_random_ddnnf(n: int, node_budget: int = 60, seed: int = 0) -> NnfDag:
    """Random decision-form, decomposable DAG over variables 1..n.

    Recursive decision splits over shrinking variable sets, with a
    coin-flip chance of reusing an already-built node for the same set
    (shared subDAGs), occasional decomposable conjunction splits, and
    branches that collapse to forced literal cubes the way unit
    propagation collapses them in compiled formulas.  Cube branches give
    the instances realistic magnitude structure: adversarial weight draws
    can actually trigger cancellation on them.
    """
    if node_budget < 8:
        raise ValueError("node budget too small")
    rng = SplitMix64(seed)
    b = _Builder()
    b.true()  # preallocate so later constant lookups never allocate
    memo: dict = {}

    def subset(vars_t: Tuple[int, ...]) -> Tuple[int, ...]:
        return tuple(v for v in vars_t if rng.coin())

    def cube(vars_t: Tuple[int, ...], limit: int) -> int:
        # a cube over k variables allocates at most k literal nodes plus
        # one conjunction; never grows the dag past limit
        room = limit - len(b.nodes) - 1
        if room < 1 or not vars_t:
            return b.true()
        vars_t = vars_t[:room]
        return b.conj([b.lit(v if rng.coin() else -v) for v in vars_t])

    def branch(rest: Tuple[int, ...], limit: int) -> int:
        roll = rng.randint(0, 99)
        if roll < 40:
            return cube(rest, limit)
        if roll < 70:
            return build(subset(rest), limit)
        return build(rest, limit)

    def build(vars_t: Tuple[int, ...], limit: int) -> int:
        if not vars_t:
            return b.true()
        if vars_t in memo and rng.coin():
            return memo[vars_t]
        if len(b.nodes) + 5 > limit or len(vars_t) == 1:
            return cube(vars_t, limit)
        if rng.randint(0, 99) < 15:
            items = list(vars_t)
            rng.shuffle(items)
            cut = rng.randint(1, len(items) - 1)
            left = build(tuple(sorted(items[:cut])), limit - 1)
            right = build(tuple(sorted(items[cut:])), limit - 1)
            out = b.conj([left, right]) if left != right else left
        else:
            x = vars_t[rng.randint(0, len(vars_t) - 1)]
            rest = tuple(v for v in vars_t if v != x)
            hi_lit, lo_lit = b.lit(x), b.lit(-x)
            hi = b.conj([hi_lit, branch(rest, limit - 3)])
            lo = b.conj([lo_lit, branch(rest, limit - 2)])
            out = b.decide(x, hi, lo)
        memo[vars_t] = out
        return out

    root = build(tuple(range(1, n + 1)), node_budget)
    return b.dag(root, n, {"family": "random-ddnnf"})
