"""Weight assignments and the per-variable evaluation plan.

A weight map binds exact rationals to literals.  Planning decides, per
variable, whether to rescale (divide both polarities by their sum so they
add to one exactly), leave the raw weights alone (sum already one), or
fall back to zero-sum smoothing (sum is zero, raw weights are used and
any branch missing the variable picks up an exact zero factor).  All plan
arithmetic is exact; the single rounding per seeded value happens later,
inside the numeric domain.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Tuple

from .nnf import NnfDag
from .rational import Rational, RationalParseError, rat_from_text


class WeightParseError(ValueError):
    pass


class Action(enum.Enum):
    NONE = "none"
    RESCALE = "rescale"
    SMOOTH_ZERO = "smooth-zero"


@dataclass
class WeightMap:
    """Declared literal weights plus the defaulting policy.

    An unmentioned complement defaults to one minus the declared weight;
    a fully unmentioned variable has unit weights on both polarities.
    """

    declared: Dict[int, Rational] = field(default_factory=dict)

    def declare(self, lit: int, value: Rational) -> None:
        if lit == 0:
            raise WeightParseError("literal 0 cannot carry a weight")
        if lit in self.declared:
            raise WeightParseError("duplicate weight declaration for literal %d" % lit)
        self.declared[lit] = value

    def pair(self, var: int) -> Tuple[Rational, Rational]:
        """Effective (positive, negative) weights after defaulting."""
        pos = self.declared.get(var)
        neg = self.declared.get(-var)
        if pos is None and neg is None:
            return Fraction(1), Fraction(1)
        if pos is None:
            pos = 1 - neg
        elif neg is None:
            neg = 1 - pos
        return pos, neg

    def literal_weight(self, lit: int) -> Rational:
        pos, neg = self.pair(abs(lit))
        return pos if lit > 0 else neg

    def declared_vars(self) -> List[int]:
        return sorted({abs(lit) for lit in self.declared})

    def undeclared_variable_factor(self, num_vars: int) -> Rational:
        """Product of w(x) + w(!x) over declared variables the formula does
        not even number; they multiply the count like any free variable."""
        factor = Fraction(1)
        for v in self.declared_vars():
            if v > num_vars:
                pos, neg = self.pair(v)
                factor *= pos + neg
        return factor


def parse_weights(text: str) -> WeightMap:
    """Parse weight declarations.

    Accepted lines: "w <lit> <value>" and the CNF-comment form
    "c p weight <lit> <value> 0".  Values are decimal literals or p/q
    fractions.  Blank lines, '%' comments, other 'c' comments, and a
    'p ...' problem header are ignored.
    """
    wm = WeightMap()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        fields = line.split()
        if fields[0] == "c":
            if len(fields) >= 5 and fields[1] == "p" and fields[2] == "weight":
                _declare(wm, fields[3], fields[4], lineno)
            continue
        if fields[0] == "p":
            continue
        if fields[0] == "w":
            if len(fields) != 3:
                raise WeightParseError(
                    "line %d: expected 'w <lit> <value>', got %r" % (lineno, line)
                )
            _declare(wm, fields[1], fields[2], lineno)
            continue
        raise WeightParseError("line %d: unrecognized line %r" % (lineno, line))
    return wm


def _declare(wm: WeightMap, lit_text: str, value_text: str, lineno: int) -> None:
    try:
        lit = int(lit_text)
    except ValueError:
        raise WeightParseError("line %d: bad literal token %r" % (lineno, lit_text)) from None
    try:
        value = rat_from_text(value_text)
    except RationalParseError as exc:
        raise WeightParseError("line %d: %s" % (lineno, exc)) from None
    try:
        wm.declare(lit, value)
    except WeightParseError as exc:
        raise WeightParseError("line %d: %s" % (lineno, exc)) from None


def _format_weight(v: Rational) -> str:
    """Exact text: plain integer, terminating decimal, or p/q fallback."""
    if v.denominator == 1:
        return str(v.numerator)
    den = v.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return "%d/%d" % (v.numerator, v.denominator)
    places = max(twos, fives)
    scaled = abs(v.numerator) * 10**places // v.denominator
    digits = str(scaled).rjust(places + 1, "0")
    sign = "-" if v < 0 else ""
    return "%s%s.%s" % (sign, digits[:-places], digits[-places:])


def render_weights(wm: WeightMap) -> str:
    """Deterministic rendering: ascending variable, positive then negative."""
    lines = [
        "w %d %s" % (lit, _format_weight(wm.declared[lit]))
        for lit in sorted(wm.declared, key=lambda l: (abs(l), l < 0))
    ]
    return "\n".join(lines) + ("\n" if lines else "")


def classify(wm: WeightMap) -> str:
    """"nonnegative" iff every effective weight is >= 0.

    Defaulted complements count: declaring only w(x) = 2 implies
    w(!x) = -1, which rules the map mixed.
    """
    seen = set()
    for lit in wm.declared:
        var = abs(lit)
        if var in seen:
            continue
        seen.add(var)
        pos, neg = wm.pair(var)
        if pos < 0 or neg < 0:
            return "mixed"
    return "nonnegative"


@dataclass
class EvalPlan:
    """Exact per-variable seeds and root correction factors.

    ``seeds`` maps literals to the values fed into the numeric domain
    (rescaled where applicable).  ``sigma`` maps each variable to the
    smoothing factor its absence from a branch contributes; rescaling
    makes it exactly one, so only zero-sum variables ever multiply.
    ``root_factors`` restore the rescaled magnitudes and fold in free
    variables.
    """

    actions: Dict[int, Action]
    seeds: Dict[int, Rational]
    sigma: Dict[int, Rational]
    root_factors: List[Rational]
    all_nonnegative: bool
    any_rescaled: bool
    num_vars: int
    bound_vars: int  # variables covered by the precision bound

    def seed(self, lit: int) -> Rational:
        return self.seeds[lit]

    def sigma_factors(self, missing_vars) -> List[Rational]:
        """Smoothing factors that actually need a multiplication."""
        out = []
        for v in missing_vars:
            s = self.sigma.get(v, Fraction(1))
            if s != 1:
                out.append(s)
        return out


def build_plan(wm: WeightMap, dag: NnfDag) -> EvalPlan:
    """Decide rescale / leave / smooth-zero per variable and lay out the
    exact quantities evaluation needs."""
    actions: Dict[int, Action] = {}
    seeds: Dict[int, Rational] = {}
    sigma: Dict[int, Rational] = {}
    scale_factors: List[Rational] = []
    nonneg = True
    occurring = set(dag.root_node().varset)

    for var in range(1, dag.num_vars + 1):
        pos, neg = wm.pair(var)
        if pos < 0 or neg < 0:
            nonneg = False
        s = pos + neg
        if s == 0:
            actions[var] = Action.SMOOTH_ZERO
            seeds[var], seeds[-var] = pos, neg
            sigma[var] = Fraction(0)
        elif s == 1:
            actions[var] = Action.NONE
            seeds[var], seeds[-var] = pos, neg
            sigma[var] = Fraction(1)
        else:
            actions[var] = Action.RESCALE
            seeds[var], seeds[-var] = pos / s, neg / s
            sigma[var] = Fraction(1)
            scale_factors.append(s)

    root_factors = list(scale_factors)
    # free variables: zero-sum ones outside the root zero the count;
    # rescaled ones are already restored by their scale factor
    for var in range(1, dag.num_vars + 1):
        if actions[var] is Action.SMOOTH_ZERO and var not in occurring:
            root_factors.append(Fraction(0))
    free_count = 0
    for var in wm.declared_vars():
        if var > dag.num_vars:
            pos, neg = wm.pair(var)
            if pos < 0 or neg < 0:
                nonneg = False
            root_factors.append(pos + neg)
            free_count += 1

    return EvalPlan(
        actions=actions,
        seeds=seeds,
        sigma=sigma,
        root_factors=root_factors,
        all_nonnegative=nonneg,
        any_rescaled=bool(scale_factors),
        num_vars=dag.num_vars,
        bound_vars=max(1, dag.num_vars + free_count),
    )
