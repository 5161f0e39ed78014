"""Graph entropies and the rate bounds built from them."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .ccc import JointSupport
from .chargraph import Graph, bits
from .coloring import enumerate_mis
from .core import (DEFAULT_BUDGET, Budget, BudgetError, Scenario, check_budget,
                   mass_entropy, shannon_conditional)
from .tree import complete_tree, star_tree

LOG2E = 1.0 / math.log(2.0)


def maximal_independent_sets(g: Graph, budget: Budget = DEFAULT_BUDGET,
                             support_only: bool = False) -> list[tuple[int, ...]]:
    """Every maximal independent set, sorted as vertex lists."""
    verts = [v for v in range(g.size) if not support_only or g.vertex_prob[v] > 0]
    check_budget("independent-set enumeration vertices", len(verts), max(budget.exact_cap, 64))
    return [tuple(bits(m)) for m in enumerate_mis(g.adj, sum(1 << v for v in verts))]


@dataclass(frozen=True, eq=False)
class GraphEntropyResult:
    value: float
    conditional: np.ndarray          # p(w|x) over support vertices x
    mis: list[tuple[int, ...]]
    vertices: list[int]              # rows of ``conditional``
    trace: list[float] = field(repr=False)
    iterations: int = 0


def _alternating_min(p_xy: np.ndarray, A: np.ndarray, tol: float, max_iter: int
                     ) -> tuple[float, np.ndarray, list[float]]:
    """min over p(w|x) supported on A[x, w] of I(W; X | Y) with W - X - Y.

    Alternates q(w|y) = sum_x p(x|y) p(w|x) with
    p(w|x) proportional to [x in w] exp(sum_y p(y|x) log q(w|y)).
    With a single y this is the plain Blahut-Arimoto style update
    p(w|x) proportional to q(w) [x in w].
    """
    px = p_xy.sum(axis=1)
    py = p_xy.sum(axis=0)
    p_x_given_y = p_xy / np.where(py > 0, py, 1.0)          # (x, y)
    p_y_given_x = (p_xy.T / np.where(px > 0, px, 1.0)).T     # (x, y)
    W = A / A.sum(axis=1, keepdims=True)

    def value(W):
        q = p_x_given_y.T @ W                                # (y, w)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(W[:, None, :] > 0,
                             W[:, None, :] / np.where(q[None, :, :] > 0, q[None, :, :], 1.0), 1.0)
            terms = np.where(W[:, None, :] > 0, W[:, None, :] * np.log2(ratio), 0.0)
        return float((p_xy[:, :, None] * terms).sum()), q

    cur, q = value(W)
    trace = [cur]
    for _ in range(max_iter):
        logq = np.log(np.maximum(q, 1e-300))
        L = p_y_given_x @ logq                                # (x, w)
        L = np.where(A, L, -np.inf)
        L -= L.max(axis=1, keepdims=True)
        W = np.exp(L)
        W /= W.sum(axis=1, keepdims=True)
        new, q = value(W)
        trace.append(new)
        if cur - new < tol:
            cur = new
            break
        cur = new
    return max(cur, 0.0), W, trace


def _setup(g: Graph, budget: Budget):
    verts = [v for v in range(g.size) if g.vertex_prob[v] > 0]
    mis = maximal_independent_sets(g.induced(verts), budget)
    mis = [tuple(verts[i] for i in s) for s in mis]
    A = np.zeros((len(verts), len(mis)), dtype=bool)
    row = {v: r for r, v in enumerate(verts)}
    for w, s in enumerate(mis):
        for v in s:
            A[row[v], w] = True
    if not A.any(axis=1).all():
        raise ValueError("a vertex lies in no maximal independent set")
    return verts, mis, A


def graph_entropy(g: Graph, tol: float = 1e-9, max_iter: int = 100_000,
                  budget: Budget = DEFAULT_BUDGET) -> GraphEntropyResult:
    """Koerner graph entropy: min I(X; W) with X in W, W independent."""
    verts, mis, A = _setup(g, budget)
    p = g.vertex_prob[verts]
    p = p / p.sum()
    val, W, trace = _alternating_min(p[:, None], A, tol, max_iter)
    return GraphEntropyResult(val, W, mis, verts, trace, len(trace) - 1)


def conditional_graph_entropy(g: Graph, joint: np.ndarray, tol: float = 1e-9,
                              max_iter: int = 100_000, budget: Budget = DEFAULT_BUDGET
                              ) -> GraphEntropyResult:
    """min I(W; X1 | X2) over W - X1 - X2, X1 in W, W independent in g.

    ``joint`` is the (|X1|, |X2|) pmf; rows align with the vertices of g.
    """
    joint = np.asarray(joint, dtype=np.float64)
    if joint.shape[0] != g.size:
        raise ValueError("joint rows must match graph vertices")
    verts, mis, A = _setup(Graph(g.vertices, g.edges, joint.sum(axis=1)), budget)
    pxy = joint[verts] / joint.sum()
    val, W, trace = _alternating_min(pxy, A, tol, max_iter)
    return GraphEntropyResult(val, W, mis, verts, trace, len(trace) - 1)


# ---------------------------------------------------------------------------
# Finite-n joint quantities
# ---------------------------------------------------------------------------


def valid_colorings(g: Graph, limit: int) -> list[tuple[int, ...]]:
    """All valid colorings of the positive-probability vertices as restricted
    growth strings; zero-probability vertices get fresh colors."""
    pos = [v for v in range(g.size) if g.vertex_prob[v] > 0]
    zero = [v for v in range(g.size) if g.vertex_prob[v] <= 0]
    out: list[tuple[int, ...]] = []
    assign = [-1] * g.size
    class_masks: list[int] = []

    def rec(t: int) -> None:
        if t == len(pos):
            full = list(assign)
            nxt = len(class_masks)
            for v in zero:
                full[v] = nxt
                nxt += 1
            out.append(tuple(full))
            if len(out) > limit:
                raise BudgetError("valid colorings", len(out), limit)
            return
        v = pos[t]
        for c, m in enumerate(class_masks):
            if not g.adj[v] & m:
                class_masks[c] = m | 1 << v
                assign[v] = c
                rec(t + 1)
                class_masks[c] = m
        class_masks.append(1 << v)
        assign[v] = len(class_masks) - 1
        rec(t + 1)
        class_masks.pop()
        assign[v] = -1

    rec(0)
    return out


@dataclass(frozen=True, eq=False)
class JointEntropyResult:
    value: float
    colorings: tuple[tuple[int, ...], ...]
    n: int
    subset: tuple[int, ...]
    conditional: bool
    tuples_checked: int

    @property
    def label(self) -> str:
        return f"finite-n upper bound, n={self.n}"


def _codes(cols: Sequence[np.ndarray]) -> np.ndarray:
    """Collapse per-point color columns into one small nonnegative integer
    code per point (mixed radix, re-densified when it grows)."""
    if not cols:
        return np.zeros(0, dtype=np.int64)
    code = np.zeros(len(cols[0]), dtype=np.int64)
    cap = 8 * len(code) + 64
    for c in cols:
        c = np.asarray(c, dtype=np.int64)
        code = code * (int(c.max()) + 1) + c
        if code.max() >= cap:
            code = np.unique(code, return_inverse=True)[1].ravel()
    return code


def _distinct(codes: np.ndarray) -> int:
    return int(np.count_nonzero(np.bincount(codes)))


def _mass_entropy_of(codes: np.ndarray, probs: np.ndarray) -> float:
    return mass_entropy(np.bincount(codes, weights=probs))


def _fvals_codes(fvals) -> np.ndarray:
    index: dict = {}
    return np.array([index.setdefault(f, len(index)) for f in fvals], dtype=np.int64)


def min_joint_coloring(support: JointSupport, subset: Sequence[int], *,
                       conditional: bool = True, require_ccc: bool = True,
                       budget: Budget = DEFAULT_BUDGET) -> JointEntropyResult:
    """Exhaustive minimum of (1/n) H(c_S | X_{S^c}) (or of H(c_S) when
    ``conditional`` is false) over tuples of valid colorings of the
    coordinates in ``subset``; other coordinates keep distinct colors.

    With valid colorings, C.C.C. holds exactly when every joint class carries
    a single function value, so the filter checks that directly.
    """
    subset = tuple(sorted(subset))
    rest = [i for i in range(support.k) if i not in subset]
    options = []
    for i in subset:
        g = support.graph(i)
        options.append(valid_colorings(g, budget.coloring_search))
    total = math.prod(len(o) for o in options)
    check_budget("coloring tuples", total, budget.coloring_search)

    probs = support.probs
    fcode = _fvals_codes(support.fvals)
    rest_cols = [support.points[:, i] for i in rest]
    h_rest = _mass_entropy_of(_codes(rest_cols), probs) if rest else 0.0
    best, best_cols, checked = math.inf, None, 0
    for combo in itertools.product(*options):
        checked += 1
        cols = [np.asarray(c)[support.points[:, i]] for c, i in zip(combo, subset)]
        all_codes = _codes(cols + rest_cols)
        if require_ccc:
            pair = _codes([all_codes, fcode])
            if _distinct(pair) != _distinct(all_codes):
                continue
        if conditional:
            h = _mass_entropy_of(all_codes, probs) - h_rest
        else:
            h = _mass_entropy_of(_codes(cols), probs) if cols else 0.0
        if h < best - 1e-12:
            best, best_cols = h, combo
    return JointEntropyResult(max(best, 0.0) / support.n, tuple(best_cols), support.n,
                              subset, conditional, checked)


def joint_graph_entropy_finite_n(scenario: Scenario, S: Sequence[int], n: int = 1,
                                 budget: Budget = DEFAULT_BUDGET) -> JointEntropyResult:
    support = JointSupport.from_scenario(scenario, n, budget=budget)
    return min_joint_coloring(support, S, conditional=False, budget=budget)


def conditional_joint_graph_entropy_finite_n(scenario: Scenario, S: Sequence[int], n: int = 1,
                                             budget: Budget = DEFAULT_BUDGET
                                             ) -> JointEntropyResult:
    support = JointSupport.from_scenario(scenario, n, budget=budget)
    return min_joint_coloring(support, S, conditional=True, budget=budget)


# ---------------------------------------------------------------------------
# Rate regions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RateInequality:
    stage: int
    links: tuple[int, ...]   # 1-based link indices within the stage
    bound: float
    label: str

    @property
    def available(self) -> bool:
        return not math.isnan(self.bound)

    def render(self) -> str:
        lhs = "+".join(f"R_{{{self.stage},{j}}}" for j in self.links)
        value = f"{self.bound:.6f}" if self.available else "?"
        return f"{lhs} >= {value} [{self.label}]"


@dataclass(frozen=True)
class RateRegion:
    inequalities: tuple[RateInequality, ...]

    def bound(self, links: Sequence[int], stage: int = 1) -> float:
        key = tuple(sorted(links))
        for q in self.inequalities:
            if q.stage == stage and q.links == key:
                return q.bound
        raise KeyError((stage, key))

    def render(self) -> str:
        rows = sorted(self.inequalities, key=lambda q: (q.stage, len(q.links), q.links))
        return "\n".join(q.render() for q in rows)


def _injective(support: JointSupport) -> bool:
    """f separates every support point: the lossless (identity) case."""
    return len(set(support.fvals)) == len(support.fvals)


def _region_for_support(support: JointSupport, stage: int, budget: Budget,
                        partial: bool = False) -> list[RateInequality]:
    out = []
    exact = _injective(support)
    for r in range(1, support.k + 1):
        for S in itertools.combinations(range(support.k), r):
            links = tuple(i + 1 for i in S)
            try:
                res = min_joint_coloring(support, S, conditional=True, budget=budget)
            except BudgetError as exc:
                if not partial:
                    raise
                out.append(RateInequality(stage, links, math.nan, f"unavailable: {exc}"))
                continue
            label = "exact" if exact else res.label
            out.append(RateInequality(stage, links, res.value, label))
    return out


def rate_region_one_stage(scenario: Scenario, n: int = 1, budget: Budget = DEFAULT_BUDGET
                          ) -> RateRegion:
    """One inequality per nonempty source subset S: sum of R_{1,i} over S is
    at least the conditional joint graph entropy of S given the rest."""
    support = JointSupport.from_scenario(scenario, n, budget=budget)
    return RateRegion(tuple(_region_for_support(support, 1, budget)))


def rate_lower_bound_tree(scenario: Scenario, n: int = 1, budget: Budget = DEFAULT_BUDGET,
                          partial: bool = False) -> RateRegion:
    """Per stage of the completed tree, the same bounds with every node's
    source group treated as one super-source.

    With ``partial`` an inequality that exceeds the budget is reported as
    unavailable (NaN) instead of aborting the whole region."""
    tree = complete_tree(scenario.tree or star_tree(scenario.k))
    ineqs = []
    for i, groups in enumerate(tree.connection_set(), start=1):
        support = JointSupport.from_scenario(scenario, n, groups=groups, budget=budget)
        ineqs += _region_for_support(support, i, budget, partial)
    return RateRegion(tuple(ineqs))


def shannon_region(scenario: Scenario) -> RateRegion:
    """Slepian-Wolf bounds H(X_S | X_{S^c}) for comparison."""
    out = []
    for r in range(1, scenario.k + 1):
        for S in itertools.combinations(range(scenario.k), r):
            out.append(RateInequality(1, tuple(i + 1 for i in S),
                                      shannon_conditional(scenario.pmf, S), "exact"))
    return RateRegion(tuple(out))


# ---------------------------------------------------------------------------
# Chain rule
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ChainRuleVerdict:
    verdict: str
    sufficient_condition: bool | None
    gaps: dict[tuple[int, ...], float]
    witness: tuple[int, ...] | None

    def render(self) -> str:
        lines = [f"verdict: {self.verdict}"]
        if self.sufficient_condition is not None:
            lines.append(f"sufficient condition: {'holds' if self.sufficient_condition else 'fails'}")
        for s, gap in sorted(self.gaps.items()):
            lines.append(f"subset {{{','.join(str(i + 1) for i in s)}}}: gap {gap:.6f}")
        return "\n".join(lines)


def chain_rule_sufficient(scenario: Scenario, function: int = 0) -> bool:
    """Two sources: different x2 values never share a function value."""
    if scenario.k != 2:
        raise ValueError("sufficient condition is stated for two sources")
    F = np.asarray(scenario.full_table(function))
    cols = [set(F[:, b].tolist()) for b in range(F.shape[1])]
    return all(not (cols[a] & cols[b]) for a, b in itertools.combinations(range(len(cols)), 2))


def is_chain_rule_proper(scenario: Scenario, n: int = 1, tol: float = 1e-9,
                         budget: Budget = DEFAULT_BUDGET) -> ChainRuleVerdict:
    if scenario.k == 1:
        return ChainRuleVerdict("proper (single source)", None, {(0,): 0.0}, None)
    suff = chain_rule_sufficient(scenario) if scenario.k == 2 else None
    gaps = {}
    witness = None
    base = JointSupport.from_scenario(scenario, n, budget=budget)
    for r in range(2, scenario.k + 1):
        for s in itertools.combinations(range(scenario.k), r):
            joint = min_joint_coloring(base, s, conditional=False, budget=budget).value
            groups = [list(s)] + [[i] for i in range(scenario.k) if i not in s]
            grouped = JointSupport.from_scenario(scenario, n, groups=groups, budget=budget)
            single = min_joint_coloring(grouped, (0,), conditional=False, budget=budget).value
            gaps[s] = joint - single
            if abs(gaps[s]) > tol and witness is None:
                witness = s
    if suff:
        verdict = "proper (sufficient condition)"
    elif witness is None:
        verdict = f"numerically proper at n={n} within tol"
    else:
        verdict = "not proper (witness subset {" + ",".join(str(i + 1) for i in witness) + "})"
    return ChainRuleVerdict(verdict, suff, gaps, witness)


def chain_rule_gap(scenario: Scenario, n: int = 1, budget: Budget = DEFAULT_BUDGET
                   ) -> tuple[float, float]:
    """(joint value, chained value J(X1) + J(X2 | X1)) for two sources."""
    support = JointSupport.from_scenario(scenario, n, budget=budget)
    joint = min_joint_coloring(support, (0, 1), conditional=False, budget=budget).value
    first = min_joint_coloring(support, (0,), conditional=False, budget=budget).value
    second = min_joint_coloring(support, (1,), conditional=True, budget=budget).value
    return joint, first + second
