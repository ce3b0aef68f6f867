"""Formula DAGs: literals, constants, conjunctions, decision disjunctions.

Parses the classic line-oriented NNF exchange format (header plus L/A/O
node lines, ids by declaration order) and a small s-expression form for
hand-written tests.  After parsing, every node carries its variable set,
and disjunction nodes carry the per-branch sets of variables missing
relative to their siblings, which is what implicit smoothing needs.

A brute-force weighted assignment enumerator lives here as the independent
reference for everything the circuit evaluator computes.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, Optional

from .rational import Rational

if TYPE_CHECKING:
    from .weights import WeightMap

ENUMERATION_LIMIT = 25


class NnfParseError(ValueError):
    pass


class EnumerationRefused(RuntimeError):
    """Variable count too large for assignment enumeration."""


@dataclass
class LitNode:
    lit: int  # signed variable index
    varset: tuple = ()

    @property
    def var(self) -> int:
        return abs(self.lit)


@dataclass
class TrueNode:
    varset: tuple = ()


@dataclass
class FalseNode:
    varset: tuple = ()


@dataclass
class AndNode:
    children: tuple
    varset: tuple = ()


@dataclass
class OrNode:
    children: tuple
    decision_var: Optional[int] = None
    varset: tuple = ()
    # per child: variables its siblings mention that it does not
    smoothing_gaps: tuple = ()


Node = object


@dataclass
class NnfDag:
    nodes: list
    root: int
    num_vars: int
    meta: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.nodes)

    def root_node(self):
        return self.nodes[self.root]


@dataclass
class StructureReport:
    decomposable: bool
    decision_form: bool
    smooth: bool
    notes: dict = field(default_factory=dict)


def _strip_comment_lines(lines):
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("%") or line.startswith("c"):
            yield lineno, line, True
        else:
            yield lineno, line, False


def parse_nnf(text: str) -> NnfDag:
    """Parse the classic NNF exchange format.

    Header "nnf <nodes> <edges> <vars>", then one node per line:
    "L <lit>", "A <count> <ids...>" ("A 0" is true), or
    "O <decision-var> <count> <ids...>" ("O 0 0" is false).  Ids are
    assigned by declaration order from 0; children must already exist.
    """
    meta: dict = {}
    header = None
    nodes: list = []

    def fail(lineno: int, msg: str):
        raise NnfParseError("line %d: %s" % (lineno, msg))

    for lineno, line, is_comment in _strip_comment_lines(text.splitlines()):
        if is_comment:
            fields = line.split()
            if len(fields) >= 4 and fields[:2] == ["c", "meta"]:
                meta[fields[2]] = " ".join(fields[3:])
            continue
        fields = line.split()
        if header is None:
            if fields[0] != "nnf" or len(fields) != 4:
                fail(lineno, "expected header 'nnf <nodes> <edges> <vars>'")
            try:
                header = tuple(int(f) for f in fields[1:])
            except ValueError:
                fail(lineno, "non-numeric header field in %r" % line)
            continue
        kind = fields[0]
        node_id = len(nodes)
        if kind == "L":
            if len(fields) != 2:
                fail(lineno, "literal line takes exactly one argument")
            try:
                lit = int(fields[1])
            except ValueError:
                fail(lineno, "bad literal token %r" % fields[1])
            if lit == 0 or abs(lit) > header[2]:
                fail(lineno, "literal %d out of range for %d variables" % (lit, header[2]))
            nodes.append(LitNode(lit))
        elif kind in ("A", "O"):
            try:
                vals = [int(f) for f in fields[1:]]
            except ValueError:
                fail(lineno, "non-numeric argument in %r" % line)
            if kind == "A":
                if not vals:
                    fail(lineno, "conjunction line needs a child count")
                count, ids = vals[0], vals[1:]
            else:
                if len(vals) < 2:
                    fail(lineno, "disjunction line needs decision var and count")
                count, ids = vals[1], vals[2:]
            if count != len(ids):
                fail(lineno, "child count %d does not match %d ids" % (count, len(ids)))
            for child in ids:
                if not 0 <= child < node_id:
                    fail(lineno, "dangling child id %d" % child)
            if kind == "A":
                nodes.append(TrueNode() if count == 0 else AndNode(tuple(ids)))
            elif count == 0:
                nodes.append(FalseNode())
            else:
                dec = vals[0]
                if dec < 0 or dec > header[2]:
                    fail(lineno, "decision variable %d out of range" % dec)
                nodes.append(OrNode(tuple(ids), dec if dec else None))
        else:
            fail(lineno, "unknown node kind %r" % kind)
    if header is None:
        raise NnfParseError("no header found")
    if len(nodes) != header[0]:
        raise NnfParseError(
            "header declares %d nodes, file defines %d" % (header[0], len(nodes))
        )
    if not nodes:
        raise NnfParseError("empty formula")
    dag = NnfDag(nodes, len(nodes) - 1, header[2], meta)
    return compute_varsets(dag)


def parse_sexpr(text: str, num_vars: Optional[int] = None) -> NnfDag:
    """Parse a tiny s-expression form: signed integers are literals, t/f
    are constants, (and ...) and (or ...) build internal nodes."""
    tokens = re.findall(r"[()]|[^\s()]+", text)
    pos = 0
    nodes: list = []

    def emit(node) -> int:
        nodes.append(node)
        return len(nodes) - 1

    def parse_one() -> int:
        nonlocal pos
        if pos >= len(tokens):
            raise NnfParseError("unexpected end of expression")
        tok = tokens[pos]
        pos += 1
        if tok == "(":
            if pos >= len(tokens):
                raise NnfParseError("unterminated list")
            head = tokens[pos]
            pos += 1
            children = []
            while pos < len(tokens) and tokens[pos] != ")":
                children.append(parse_one())
            if pos >= len(tokens):
                raise NnfParseError("unterminated list")
            pos += 1  # closing paren
            if head == "and":
                return emit(TrueNode() if not children else AndNode(tuple(children)))
            if head == "or":
                if not children:
                    return emit(FalseNode())
                return emit(OrNode(tuple(children)))
            raise NnfParseError("unknown operator %r" % head)
        if tok == ")":
            raise NnfParseError("unbalanced parenthesis")
        if tok in ("t", "true"):
            return emit(TrueNode())
        if tok in ("f", "false"):
            return emit(FalseNode())
        try:
            lit = int(tok)
        except ValueError:
            raise NnfParseError("bad token %r" % tok) from None
        if lit == 0:
            raise NnfParseError("literal 0 is not allowed")
        return emit(LitNode(lit))

    root = parse_one()
    if pos != len(tokens):
        raise NnfParseError("trailing tokens after expression")
    max_var = max((n.var for n in nodes if isinstance(n, LitNode)), default=0)
    if num_vars is None:
        num_vars = max_var
    elif num_vars < max_var:
        raise NnfParseError("declared %d variables, saw variable %d" % (num_vars, max_var))
    dag = NnfDag(nodes, root, num_vars)
    return compute_varsets(dag)


def compute_varsets(dag: NnfDag) -> NnfDag:
    """Annotate every node with its variable set, bottom-up, and every
    disjunction with its per-branch smoothing gaps.  Idempotent."""
    nodes = dag.nodes
    for node in nodes:
        if isinstance(node, LitNode):
            node.varset = (node.var,)
        elif isinstance(node, (TrueNode, FalseNode)):
            node.varset = ()
        elif isinstance(node, AndNode):
            merged: set = set()
            for c in node.children:
                merged.update(nodes[c].varset)
            node.varset = tuple(sorted(merged))
        else:
            union: set = set()
            for c in node.children:
                union.update(nodes[c].varset)
            node.varset = tuple(sorted(union))
            node.smoothing_gaps = tuple(
                tuple(sorted(union.difference(nodes[c].varset)))
                for c in node.children
            )
    return dag


def validate(dag: NnfDag) -> StructureReport:
    """Check decomposability, decision shape, and smoothness.

    Violations are reported, not raised; each note names the first
    offending node.
    """
    nodes = dag.nodes
    notes: dict = {}
    decomposable = True
    decision_form = True
    smooth = True

    def branch_literals(idx: int) -> set:
        node = nodes[idx]
        if isinstance(node, LitNode):
            return {node.lit}
        if isinstance(node, AndNode):
            return {nodes[c].lit for c in node.children if isinstance(nodes[c], LitNode)}
        return set()

    for idx, node in enumerate(nodes):
        if isinstance(node, AndNode) and decomposable:
            total = sum(len(nodes[c].varset) for c in node.children)
            if total != len(node.varset):
                decomposable = False
                notes["decomposable"] = "node %d has overlapping child variable sets" % idx
        elif isinstance(node, OrNode):
            if smooth:
                first = nodes[node.children[0]].varset
                if any(nodes[c].varset != first for c in node.children[1:]):
                    smooth = False
                    notes["smooth"] = "node %d branches mention different variables" % idx
            if decision_form:
                ok = False
                if len(node.children) == 2:
                    left = branch_literals(node.children[0])
                    right = branch_literals(node.children[1])
                    if node.decision_var:
                        x = node.decision_var
                        ok = (x in left and -x in right) or (-x in left and x in right)
                    else:
                        ok = any(-lit in right for lit in left)
                if not ok:
                    decision_form = False
                    notes["decision"] = "node %d is not a decision disjunction" % idx
    return StructureReport(decomposable, decision_form, smooth, notes)


def render_nnf(dag: NnfDag) -> str:
    """Serialize back to the classic format (ids follow list order)."""
    lines = []
    edges = sum(
        len(n.children) for n in dag.nodes if isinstance(n, (AndNode, OrNode))
    )
    lines.append("nnf %d %d %d" % (len(dag.nodes), edges, dag.num_vars))
    for key in sorted(dag.meta):
        lines.append("c meta %s %s" % (key, dag.meta[key]))
    for node in dag.nodes:
        if isinstance(node, LitNode):
            lines.append("L %d" % node.lit)
        elif isinstance(node, TrueNode):
            lines.append("A 0")
        elif isinstance(node, FalseNode):
            lines.append("O 0 0")
        elif isinstance(node, AndNode):
            lines.append("A %d %s" % (len(node.children), " ".join(map(str, node.children))))
        else:
            lines.append(
                "O %d %d %s"
                % (node.decision_var or 0, len(node.children), " ".join(map(str, node.children)))
            )
    return "\n".join(lines) + "\n"


_BYTE_BITS = [tuple(b for b in range(8) if v >> b & 1) for v in range(256)]


def _variable_mask(var: int, total_bits: int) -> int:
    """Truth table of variable ``var`` over all assignments, one bit per
    assignment index (bit i of the index is the value of variable i+1)."""
    period = 1 << var
    half = 1 << (var - 1)
    unit = ((1 << half) - 1) << half
    reps = total_bits // period
    return unit * (((1 << (period * reps)) - 1) // ((1 << period) - 1))


def model_enumerate(dag: NnfDag, weights: "WeightMap") -> Rational:
    """Weighted count by brute-force assignment enumeration.

    Truth tables are big-integer bitmasks; assignment weights come from
    half-split product tables, so the result is an exact sum over the
    satisfying assignments without touching the circuit evaluator.
    """
    n = dag.num_vars
    if n > ENUMERATION_LIMIT:
        raise EnumerationRefused(
            "%d variables exceed the enumeration limit of %d" % (n, ENUMERATION_LIMIT)
        )
    total_bits = 1 << n
    ones = (1 << total_bits) - 1
    masks: list = [0] * len(dag.nodes)
    var_masks = {v: _variable_mask(v, total_bits) for v in range(1, n + 1)}
    for idx, node in enumerate(dag.nodes):
        if isinstance(node, LitNode):
            m = var_masks[node.var]
            masks[idx] = m if node.lit > 0 else (~m & ones)
        elif isinstance(node, TrueNode):
            masks[idx] = ones
        elif isinstance(node, FalseNode):
            masks[idx] = 0
        elif isinstance(node, AndNode):
            acc = ones
            for c in node.children:
                acc &= masks[c]
            masks[idx] = acc
        else:
            acc = 0
            for c in node.children:
                acc |= masks[c]
            masks[idx] = acc
    root_mask = masks[dag.root]
    if root_mask == 0:
        return Fraction(0)

    # per-variable integer numerators over a single common denominator
    denom = 1
    pos_num = [0] * (n + 1)
    neg_num = [0] * (n + 1)
    for v in range(1, n + 1):
        wp, wn = weights.pair(v)
        d = wp.denominator * wn.denominator // math.gcd(wp.denominator, wn.denominator)
        denom *= d
        pos_num[v] = wp.numerator * (d // wp.denominator)
        neg_num[v] = wn.numerator * (d // wn.denominator)

    n_lo = n // 2
    lo_size = 1 << n_lo
    lo_table = _half_products(pos_num, neg_num, range(1, n_lo + 1))
    hi_table = _half_products(pos_num, neg_num, range(n_lo + 1, n + 1))

    total = 0
    buf = root_mask.to_bytes((total_bits + 7) // 8, "little")
    for byte_index, byte in enumerate(buf):
        if not byte:
            continue
        base = byte_index * 8
        for bit in _BYTE_BITS[byte]:
            alpha = base + bit
            total += hi_table[alpha >> n_lo] * lo_table[alpha & (lo_size - 1)]
    return Fraction(total, denom) * weights.undeclared_variable_factor(n)


def _half_products(pos_num, neg_num, var_range) -> list:
    table = [1]
    for v in var_range:
        table = [t * neg_num[v] for t in table] + [t * pos_num[v] for t in table]
    return table
