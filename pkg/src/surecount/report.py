"""Corpus sweeps with delimited output and rendered figures.

A sweep generates desk-scale instances per weight family, scores forced
fixed-width runs against the enumeration oracle, runs the escalation
driver at each target digit count, and writes everything as CSV plus
three PNG figures (achieved precision vs size, interval estimate vs
actual, and terminal-method mix per target).
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Iterable, List, Sequence

from .evaluator import (
    IntervalDomain,
    SoftFloatDomain,
    digits_floor,
    evaluate,
    hybrid_count,
)
from .generators import WEIGHT_FAMILIES, gen_random_ddnnf, gen_weights
from .interval import iv_decimal_precision
from .metrics import decimal_precision
from .nnf import model_enumerate
from .weights import build_plan

SCORE_WIDTH = 128

_METHOD_ORDER = (
    "erd",
    "softfloat-64",
    "softfloat-128",
    "softfloat-256",
    "interval-64",
    "interval-128",
    "interval-256",
    "rational",
)


def _instance_rows(args) -> List[dict]:
    """Rows for one instance: a score row plus one hybrid row per target."""
    family, index, n, node_budget, formula_seed, weight_seed, targets = args
    dag = gen_random_ddnnf(n, node_budget, formula_seed)
    wm = gen_weights(family, n, weight_seed)
    plan = build_plan(wm, dag)
    exact = model_enumerate(dag, wm)

    fixed = evaluate(dag, plan, SoftFloatDomain(SCORE_WIDTH))
    fixed_digits = decimal_precision(fixed.nominal, exact)
    ivres = evaluate(dag, plan, IntervalDomain(SCORE_WIDTH))
    iv_guess = iv_decimal_precision(ivres.value)
    iv_actual = decimal_precision(ivres.nominal, exact)

    base = {
        "family": family,
        "index": index,
        "n": n,
        "formula_seed": formula_seed,
        "weight_seed": weight_seed,
        "nonnegative": int(plan.all_nonnegative),
    }
    rows = [
        {
            **base,
            "kind": "score",
            "target": "",
            "method": "softfloat-%d" % SCORE_WIDTH,
            "digits": "%.4f" % fixed_digits,
            "estimated": "%.4f" % iv_guess if iv_guess != math.inf else "inf",
            "actual": "%.4f" % iv_actual if iv_actual != math.inf else "inf",
            "seconds": "%.4f" % fixed.elapsed,
            "ops": fixed.op_count,
            "stages": "",
        }
    ]
    for target in targets:
        res = hybrid_count(dag, wm, target)
        actual = decimal_precision(res.nominal, exact)
        rows.append(
            {
                **base,
                "kind": "hybrid",
                "target": target,
                "method": res.method,
                "digits": "%.4f" % actual if actual != math.inf else "inf",
                "estimated": (
                    "inf"
                    if res.guaranteed_digits == math.inf
                    else "%.4f" % res.guaranteed_digits
                ),
                "actual": "",
                "seconds": "%.4f" % sum(s.elapsed for s in res.stages),
                "ops": sum(s.op_count for s in res.stages),
                "stages": ";".join(
                    "%s=%s" % (s.method, "ok" if s.accepted else "retry")
                    for s in res.stages
                ),
            }
        )
    return rows


def run_corpus(
    families: Sequence[str],
    per_family: int,
    max_vars: int,
    node_budget: int,
    seed: int,
    targets: Sequence[float],
    jobs: int = 1,
) -> List[dict]:
    """Generate and score per_family instances for each family.

    Instance sizes cycle over 4..max_vars so precision-vs-size trends show
    up even at desk scale.  Seeds derive deterministically from the corpus
    seed, the family, and the index.
    """
    specs = []
    for family in families:
        if family not in WEIGHT_FAMILIES:
            raise ValueError("unknown weight family %r" % family)
        for index in range(per_family):
            n = 4 + (index % max(1, max_vars - 3))
            fseed = seed * 1_000_003 + index * 7919 + _stable_hash(family)
            specs.append(
                (family, index, n, node_budget, fseed, fseed + 1, tuple(targets))
            )
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_instance_rows, specs))
    else:
        chunks = [_instance_rows(s) for s in specs]
    return [row for chunk in chunks for row in chunk]


def _stable_hash(text: str) -> int:
    """FNV-1a over the family name: stable seed derivation, no process salt."""
    h = 2166136261
    for ch in text.encode():
        h = ((h ^ ch) * 16777619) & 0xFFFFFFFF
    return h


CSV_FIELDS = [
    "family",
    "index",
    "n",
    "formula_seed",
    "weight_seed",
    "nonnegative",
    "kind",
    "target",
    "method",
    "digits",
    "estimated",
    "actual",
    "seconds",
    "ops",
    "stages",
]


def write_csv(rows: Iterable[dict], path: Path) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=CSV_FIELDS)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def _use_agg():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def figure_precision(rows: List[dict], path: Path) -> None:
    """Achieved digits at the scoring width vs variable count, with the
    guaranteed floor for nonnegative instances drawn as a line."""
    plt = _use_agg()
    fig, ax = plt.subplots(figsize=(8, 5))
    score_rows = [r for r in rows if r["kind"] == "score"]
    for family in sorted({r["family"] for r in score_rows}):
        pts = [r for r in score_rows if r["family"] == family]
        xs = [r["n"] for r in pts]
        ys = [min(float(r["digits"]), 45.0) for r in pts]
        ax.scatter(xs, ys, s=18, alpha=0.7, label=family)
    if score_rows:
        ns = sorted({r["n"] for r in score_rows})
        ax.plot(
            ns,
            [digits_floor(SCORE_WIDTH, n, "rescaled") for n in ns],
            "k--",
            label="nonnegative floor",
        )
    ax.set_xlabel("variables n")
    ax.set_ylabel("decimal digits vs oracle")
    ax.set_title("Fixed-width precision at p=%d" % SCORE_WIDTH)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def figure_interval_accuracy(rows: List[dict], path: Path) -> None:
    """Interval estimate vs actual digits; sound estimates sit on or below
    the diagonal."""
    plt = _use_agg()
    fig, ax = plt.subplots(figsize=(6, 6))
    pts = [
        r
        for r in rows
        if r["kind"] == "score" and r["estimated"] != "inf" and r["actual"] != "inf"
    ]
    for family in sorted({r["family"] for r in pts}):
        fam = [r for r in pts if r["family"] == family]
        ax.scatter(
            [float(r["estimated"]) for r in fam],
            [float(r["actual"]) for r in fam],
            s=18,
            alpha=0.7,
            label=family,
        )
    lim = 50.0
    ax.plot([0, lim], [0, lim], "k-", linewidth=0.8)
    ax.set_xlim(0, lim)
    ax.set_ylim(0, lim)
    ax.set_xlabel("estimated digits (interval)")
    ax.set_ylabel("actual digits (vs oracle)")
    ax.set_title("Interval estimate accuracy at p=%d" % SCORE_WIDTH)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def figure_method_mix(rows: List[dict], path: Path) -> None:
    """Stacked bars: share of instances finishing in each method per target."""
    plt = _use_agg()
    hybrid_rows = [r for r in rows if r["kind"] == "hybrid"]
    targets = sorted({float(r["target"]) for r in hybrid_rows})
    methods = [
        m for m in _METHOD_ORDER if any(r["method"] == m for r in hybrid_rows)
    ] + sorted(
        {r["method"] for r in hybrid_rows} - set(_METHOD_ORDER)
    )
    fig, ax = plt.subplots(figsize=(8, 5))
    bottoms = [0.0] * len(targets)
    for method in methods:
        shares = []
        for i, target in enumerate(targets):
            bucket = [r for r in hybrid_rows if float(r["target"]) == target]
            share = 100.0 * sum(r["method"] == method for r in bucket) / len(bucket)
            shares.append(share)
        ax.bar([str(t) for t in targets], shares, bottom=bottoms, label=method)
        bottoms = [b + s for b, s in zip(bottoms, shares)]
    ax.set_xlabel("target digits")
    ax.set_ylabel("percent of instances")
    ax.set_title("Terminal method by target precision")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_report(
    out_dir: Path,
    families: Sequence[str],
    per_family: int,
    max_vars: int,
    node_budget: int,
    seed: int,
    targets: Sequence[float],
    jobs: int = 1,
) -> dict:
    """Run the sweep and drop report.csv plus the three figures in out_dir.

    Returns a small summary dict (also written as report.csv rows).
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = run_corpus(families, per_family, max_vars, node_budget, seed, targets, jobs)
    write_csv(rows, out_dir / "report.csv")
    figure_precision(rows, out_dir / "precision.png")
    figure_interval_accuracy(rows, out_dir / "interval_accuracy.png")
    figure_method_mix(rows, out_dir / "method_mix.png")
    hybrid_rows = [r for r in rows if r["kind"] == "hybrid"]
    rational_share = {}
    for family in families:
        fam = [r for r in hybrid_rows if r["family"] == family]
        if fam:
            rational_share[family] = sum(
                r["method"] == "rational" for r in fam
            ) / len(fam)
    return {
        "instances": len({(r["family"], r["index"]) for r in rows}),
        "rows": len(rows),
        "rational_share": rational_share,
        "files": ["report.csv", "precision.png", "interval_accuracy.png", "method_mix.png"],
    }
