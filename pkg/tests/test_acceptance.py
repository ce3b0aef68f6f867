"""Acceptance suite: one test per criterion, each printing a pass line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines and timings.  Tolerances are pinned in the assertions.
"""

import math
import time
from fractions import Fraction

from surecount.erd import erd_add, erd_from_rational, erd_mul2, erd_to_softfloat
from surecount.evaluator import (
    ErdDomain,
    IntervalDomain,
    RationalDomain,
    SoftFloatDomain,
    digits_floor,
    error_bound,
    evaluate,
    evaluate_double_baseline,
    hybrid_count,
)
from surecount.generators import (
    SplitMix64,
    gen_product,
    gen_random_ddnnf,
    gen_tau,
    gen_weights,
    product_precision,
    product_weight,
)
from surecount.interval import iv_decimal_precision
from surecount.metrics import approx_error, decimal_precision
from surecount.nnf import model_enumerate
from surecount.softfloat import (
    sf_add,
    sf_epsilon,
    sf_mul,
    sf_round_from_rational,
    sf_to_rational,
)
from surecount.weights import WeightMap, build_plan


def _agrees_3sf(computed: float, cell: float) -> bool:
    """Within half a unit of the cell's third significant digit."""
    unit = 10.0 ** (math.floor(math.log10(abs(cell))) - 2)
    return abs(computed - cell) <= 0.5 * unit


def _report(name: str, started: float, detail: str = "") -> None:
    print("ACCEPTANCE %-38s PASS  (%.1fs) %s" % (name, time.time() - started, detail))


def test_criterion_1_bound_table():
    t0 = time.time()
    eps_cells = {53: 1.11e-16, 64: 5.42e-20, 128: 2.94e-39, 256: 8.64e-78}
    rnd_cells = {53: 15.95, 64: 19.27, 128: 38.53, 256: 77.06}
    wmc_cells = {53: 8.11, 64: 11.42, 128: 30.69, 256: 69.22}
    for p in (53, 64, 128, 256):
        assert _agrees_3sf(float(sf_epsilon(p).value), eps_cells[p])
        assert _agrees_3sf(p * math.log10(2), rnd_cells[p])
        assert _agrees_3sf(digits_floor(p, 10**7, "rescaled"), wmc_cells[p])
    _report("1 bound table (12 cells)", t0)


def test_criterion_2_linear_error_bound():
    t0 = time.time()
    checked = 0
    for i in range(200):
        n = 6 + (i % 10)
        dag = gen_random_ddnnf(n, 60, 10_000 + i)
        n_occ = max(1, len(dag.root_node().varset))
        for draw in range(3):
            wm = gen_weights("uniform+", n, 20_000 + 3 * i + draw)
            exact = model_enumerate(dag, wm)
            plan = build_plan(wm, dag)
            for p in (53, 64):
                res = evaluate(dag, plan, SoftFloatDomain(p))
                delta = approx_error(res.nominal, exact)
                assert delta <= Fraction(4 * n_occ - 2, 2**p), (i, draw, p)
                checked += 1
    assert checked == 200 * 3 * 2
    _report("2 linear error bound", t0, "%d evaluations, 0 violations" % checked)


def test_criterion_3_end_to_end_floor():
    t0 = time.time()
    checked = 0
    for i in range(150):
        n = 6 + (i % 9)
        dag = gen_random_ddnnf(n, 60, 30_000 + i)
        family = "exponential+" if i % 2 else "uniform+"
        wm = gen_weights(family, n, 31_000 + i)
        plan = build_plan(wm, dag)
        assert plan.all_nonnegative
        exact = model_enumerate(dag, wm)
        res = evaluate(dag, plan, SoftFloatDomain(128))
        floor = 38.53 - math.log10(plan.bound_vars) - math.log10(7)
        assert decimal_precision(res.nominal, exact) >= floor, i
        checked += 1
    _report("3 end-to-end digit floor", t0, "%d instances above the floor" % checked)


def test_criterion_4_optimized_product_pin():
    t0 = time.time()
    digits = product_precision(10**6, product_weight(453), 128)
    assert 32.055 <= digits <= 33.0
    _report("4 optimized product pin", t0, "digits=%.3f in [32.055, 33.0]" % digits)


def test_criterion_5_cancellation_ladder():
    t0 = time.time()
    dag, wm = gen_tau(3)
    plan = build_plan(wm, dag)
    exact = evaluate(dag, plan, RationalDomain()).value
    assert exact == Fraction(1, 10**27)

    collapsed = evaluate(dag, plan, SoftFloatDomain(128))
    assert decimal_precision(collapsed.nominal, exact) < 1.0

    est128 = iv_decimal_precision(evaluate(dag, plan, IntervalDomain(128)).value)
    est256 = iv_decimal_precision(evaluate(dag, plan, IntervalDomain(256)).value)
    assert est128 < 30 and est256 < 30

    res = hybrid_count(dag, wm, 30)
    assert res.method == "rational"
    assert res.exact == exact
    assert [s.method for s in res.stages] == ["interval-128", "interval-256", "rational"]
    _report(
        "5 cancellation ladder", t0,
        "interval estimates %.1f / %.1f, exact fallback" % (est128, est256),
    )


def test_criterion_6_interval_soundness():
    t0 = time.time()
    checked = 0
    for i in range(200):
        n = 8 + (i % 7)
        family = "uniform+-" if i % 2 else "limits+-"
        dag = gen_random_ddnnf(n, 70, 60_000 + i)
        wm = gen_weights(family, n, 61_000 + i)
        exact = model_enumerate(dag, wm)
        res = evaluate(dag, build_plan(wm, dag), IntervalDomain(128))
        lo = sf_to_rational(res.value.lo)
        hi = sf_to_rational(res.value.hi)
        assert lo <= exact <= hi, i
        estimated = iv_decimal_precision(res.value)
        actual = decimal_precision(res.nominal, exact)
        assert actual >= estimated, (i, estimated, actual)
        checked += 1
    assert checked == 200
    _report("6 interval soundness", t0, "%d/%d sound" % (checked, checked))


def test_criterion_7_extended_range_fidelity():
    t0 = time.time()
    dag, wm = gen_product(10**5, Fraction(1, 10**100))
    plan = build_plan(wm, dag)

    baseline = evaluate_double_baseline(dag, plan)
    assert baseline.underflow and baseline.value == 0.0

    res = evaluate(dag, plan, ErdDomain())
    exact = Fraction(1, 10**100) ** (10**5)
    digits = decimal_precision(res.nominal, exact)
    floor = 53 * math.log10(2) - math.log10(10**5) - math.log10(4)
    assert digits >= floor

    rng = SplitMix64(99)
    for _ in range(10_000):
        num_a = rng.randint(-(10**12), 10**12)
        num_b = rng.randint(-(10**12), 10**12)
        den = rng.randint(1, 10**12)
        va, vb = Fraction(num_a, den), Fraction(num_b, den)
        ea, eb = erd_from_rational(va), erd_from_rational(vb)
        sa = sf_round_from_rational(va, 53)
        sb = sf_round_from_rational(vb, 53)
        assert erd_to_softfloat(erd_mul2(ea, eb)) == sf_mul(sa, sb)
        assert erd_to_softfloat(erd_add(ea, eb)) == sf_add(sa, sb)
    _report(
        "7 extended-range fidelity", t0,
        "digits=%.2f >= floor=%.2f, 10^4 pairs bit-exact" % (digits, floor),
    )


def _random_circuit(seed: int):
    """Arbitrary nonnegative product/sum circuit as a formula DAG (k-ary
    nodes, no decomposability requirement) plus its weight map."""
    from surecount.generators import _Builder

    rng = SplitMix64(seed)
    b = _Builder()
    nvars = rng.randint(3, 10)
    wm = WeightMap()
    for v in range(1, nvars + 1):
        wm.declare(v, Fraction(rng.randint(0, 10**9), 10**9))
        wm.declare(-v, Fraction(rng.randint(0, 10**9), 10**9))
    pool = [b.lit(v if rng.coin() else -v) for v in range(1, nvars + 1)]
    for _ in range(rng.randint(2, 12)):
        k = rng.randint(2, min(5, len(pool)))
        children = []
        for _ in range(k):
            children.append(pool[rng.randint(0, len(pool) - 1)])
        children = list(dict.fromkeys(children))
        if len(children) < 2:
            continue
        from surecount.nnf import AndNode, OrNode

        node = AndNode(tuple(children)) if rng.coin() else OrNode(tuple(children))
        pool.append(b.add(node))
    root = pool[-1]
    return b.dag(root, nvars), wm


def test_criterion_8_apriori_bound_soundness():
    t0 = time.time()
    eps = Fraction(1, 2**64)
    checked = 0
    for seed in range(500):
        dag, wm = _random_circuit(1_000_000 + seed)
        plan = build_plan(wm, dag)
        units = error_bound(dag, plan)
        exact = evaluate(dag, plan, RationalDomain())
        approx = evaluate(dag, plan, SoftFloatDomain(64))
        assert approx.op_count <= 200
        assert approx_error(approx.nominal, exact.value) <= units * eps, seed
        checked += 1
    assert checked == 500
    _report("8 a-priori bound soundness", t0, "%d circuits, 0 violations" % checked)


def test_criterion_9_hybrid_mix_accounting():
    t0 = time.time()
    families = ("uniform+", "exponential+", "uniform+-", "exponential+-", "limits+-")
    nonneg_families = {"uniform+", "exponential+"}
    targets = (1, 15, 30, 70)
    rational_at_30 = {fam: 0 for fam in families}
    total = 0
    for fam in families:
        for i in range(100):
            n = 10 + (i % 5)
            dag = gen_random_ddnnf(n, 80, 40_000 + i)
            wm = gen_weights(fam, n, 50_000 + i)
            for target in targets:
                res = hybrid_count(dag, wm, target)
                assert res.guaranteed_digits >= target, (fam, i, target)
                methods = [s.method for s in res.stages]
                if fam in nonneg_families:
                    assert all(
                        m.startswith(("erd", "softfloat")) for m in methods
                    ), (fam, i, target, methods)
                if target == 30 and res.method == "rational":
                    rational_at_30[fam] += 1
                total += 1
    assert total == 5 * 100 * len(targets)
    assert rational_at_30["limits+-"] > rational_at_30["uniform+-"]
    _report(
        "9 hybrid mix accounting", t0,
        "rational fallbacks at D=30: %s" % rational_at_30,
    )
