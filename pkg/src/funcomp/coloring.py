"""Graph colorings and minimum-entropy coloring search."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .chargraph import Graph, bits, characteristic_graph, extract_function_regions
from .core import DEFAULT_BUDGET, Budget, Scenario, check_budget, mass_entropy

TIE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Coloring:
    """Dense vertex -> color map with colors numbered by first appearance."""

    assignment: tuple[int, ...]

    @classmethod
    def canonical(cls, assignment: Sequence[int]) -> "Coloring":
        relabel: dict[int, int] = {}
        out = []
        for c in assignment:
            if c not in relabel:
                relabel[c] = len(relabel)
            out.append(relabel[c])
        return cls(tuple(out))

    @classmethod
    def trivial(cls, size: int) -> "Coloring":
        return cls(tuple(range(size)))

    @property
    def num_colors(self) -> int:
        return max(self.assignment) + 1 if self.assignment else 0

    def __getitem__(self, v: int) -> int:
        return self.assignment[v]

    def __len__(self) -> int:
        return len(self.assignment)

    def __eq__(self, other) -> bool:
        return isinstance(other, Coloring) and self.assignment == other.assignment

    def __hash__(self) -> int:
        return hash(self.assignment)

    def classes(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.num_colors)]
        for v, c in enumerate(self.assignment):
            out[c].append(v)
        return out

    def distribution(self, probs) -> np.ndarray:
        return np.bincount(self.assignment, weights=np.asarray(probs, dtype=float),
                           minlength=self.num_colors)

    def entropy(self, probs) -> float:
        return mass_entropy(self.distribution(probs))


@dataclass(frozen=True)
class ColoringSearchReport:
    coloring: Coloring | None
    entropy: float
    method: str
    nodes: int = 0
    optimal: bool = False
    applicable: bool = True

    def render(self) -> str:
        lines = [f"method: {self.method}",
                 f"applicable: {'yes' if self.applicable else 'no'}"]
        if self.coloring is not None:
            lines += [f"entropy: {self.entropy:.6f}",
                      f"colors: {self.coloring.num_colors}",
                      f"optimal: {'yes' if self.optimal else 'no'}",
                      f"nodes: {self.nodes}"]
        return "\n".join(lines)


def is_valid_coloring(g: Graph, c: Coloring | Sequence[int]) -> tuple[bool, tuple[int, int] | None]:
    assign = c.assignment if isinstance(c, Coloring) else tuple(c)
    if len(assign) != g.size:
        raise ValueError("coloring must assign every vertex")
    for i, j in sorted(g.edges):
        if assign[i] == assign[j]:
            return False, (i, j)
    return True, None


# ---------------------------------------------------------------------------
# Independent sets
# ---------------------------------------------------------------------------


def enumerate_mis(adj: Sequence[int], within: int) -> list[int]:
    """All maximal independent sets of the subgraph induced by ``within``
    (bitmasks), via Bron-Kerbosch with pivoting on the complement."""
    out: list[int] = []

    def non_nbrs(v: int) -> int:
        return within & ~adj[v] & ~(1 << v)

    def bk(r: int, p: int, x: int) -> None:
        if not p and not x:
            out.append(r)
            return
        px = p | x
        pivot = max(bits(px), key=lambda u: (non_nbrs(u) & p).bit_count())
        for v in bits(p & ~non_nbrs(pivot)):
            nv = non_nbrs(v)
            bk(r | 1 << v, p & nv, x & nv)
            p &= ~(1 << v)
            x |= 1 << v

    if within:
        bk(0, within, 0)
    out.sort(key=lambda m: bits(m))
    return out


def _mass(mask: int, probs: Sequence[float]) -> float:
    return sum(probs[v] for v in bits(mask))


def max_weight_independent_set(g: Graph, within: int | None = None,
                               budget: Budget = DEFAULT_BUDGET) -> int:
    """Heaviest independent set inside ``within``; ties go to the
    lexicographically smallest vertex list.  Exact up to ``budget.exact_cap``
    vertices, greedy by p/(deg+1) above it."""
    within = (1 << g.size) - 1 if within is None else within
    probs = g.vertex_prob
    if within.bit_count() <= budget.exact_cap:
        best, best_w = 0, -1.0
        for s in enumerate_mis(g.adj, within):
            w = _mass(s, probs)
            if w > best_w + TIE_TOL:
                best, best_w = s, w
        return best
    verts = bits(within)
    deg = {v: (g.adj[v] & within).bit_count() for v in verts}
    chosen = 0
    for v in sorted(verts, key=lambda v: (-probs[v] / (deg[v] + 1), v)):
        if not g.adj[v] & chosen:
            chosen |= 1 << v
    return chosen


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def _place_leftovers(g: Graph, assign: list[int], leftovers: Sequence[int]) -> None:
    """Put each leftover vertex in the lowest color free of its neighbors."""
    ncol = max((c for c in assign if c >= 0), default=-1) + 1
    for v in leftovers:
        used = {assign[u] for u in g.neighbors(v) if assign[u] >= 0}
        c = next((c for c in range(ncol) if c not in used), ncol)
        assign[v] = c
        ncol = max(ncol, c + 1)


def _assignment_from_classes(g: Graph, classes: Sequence[int], leftovers) -> Coloring:
    assign = [-1] * g.size
    for c, mask in enumerate(classes):
        for v in bits(mask):
            assign[v] = c
    _place_leftovers(g, assign, leftovers)
    return Coloring.canonical(assign)


def _packing_bound(rest: float, cap: float) -> float:
    """Least entropy contribution of mass ``rest`` split into parts <= cap."""
    if rest <= TIE_TOL:
        return 0.0
    if cap <= 0:
        return math.inf
    k = math.floor(rest / cap + 1e-12)
    rem = rest - k * cap
    out = -k * cap * math.log2(cap)
    if rem > TIE_TOL:
        out -= rem * math.log2(rem)
    return out


class _NodeLimit(Exception):
    pass


# ---------------------------------------------------------------------------
# Search
# ---------------------------------------------------------------------------


def greedy_mis_coloring(g: Graph, budget: Budget = DEFAULT_BUDGET) -> ColoringSearchReport:
    """Repeatedly give one color to a maximum-probability independent set."""
    pos = [v for v in range(g.size) if g.vertex_prob[v] > 0]
    zero = [v for v in range(g.size) if g.vertex_prob[v] <= 0]
    remaining = sum(1 << v for v in pos)
    classes = []
    while remaining:
        s = max_weight_independent_set(g, remaining, budget)
        classes.append(s)
        remaining &= ~s
    col = _assignment_from_classes(g, classes, zero)
    return ColoringSearchReport(col, col.entropy(g.vertex_prob), "greedy", len(classes), False)


def refine_coloring(g: Graph, coloring: Coloring) -> Coloring:
    """Local search: move single vertices or merge classes while entropy drops."""
    probs = g.vertex_prob
    assign = list(coloring.assignment)
    improved = True
    while improved:
        improved = False
        masses = np.bincount(assign, weights=probs, minlength=max(assign) + 1)
        # merge two classes whose union stays independent
        classes = Coloring.canonical(assign).classes()
        assign = list(Coloring.canonical(assign).assignment)
        for a in range(len(classes)):
            for b in range(a + 1, len(classes)):
                ma = sum(1 << v for v in classes[a])
                if all(not (g.adj[v] & ma) for v in classes[b]):
                    for v in classes[b]:
                        assign[v] = a
                    improved = True
                    break
            if improved:
                break
        if improved:
            assign = list(Coloring.canonical(assign).assignment)
            continue
        masses = np.bincount(assign, weights=probs, minlength=max(assign) + 1)
        current = mass_entropy(masses)
        for v in range(g.size):
            if probs[v] <= 0:
                continue
            used = {assign[u] for u in g.neighbors(v)}
            for c in range(len(masses)):
                if c == assign[v] or c in used:
                    continue
                trial = masses.copy()
                trial[assign[v]] -= probs[v]
                trial[c] += probs[v]
                if mass_entropy(trial) < current - TIE_TOL:
                    assign[v] = c
                    improved = True
                    break
            if improved:
                break
        if improved:
            assign = list(Coloring.canonical(assign).assignment)
    return Coloring.canonical(assign)


def min_entropy_coloring_exact(g: Graph, budget: Budget = DEFAULT_BUDGET,
                               node_limit: int | None = None) -> ColoringSearchReport:
    """Branch and bound over chains of residual maximal independent sets.

    Some optimal coloring lists its classes with nonincreasing mass where
    each class is maximal in the graph left after removing earlier classes
    (moving mass into a heavier class never raises entropy), so only such
    chains are explored.  Zero-probability vertices are placed afterwards.
    The bound adds to the fixed classes the best packing of the remaining
    mass into parts no heavier than the last class or the heaviest residual
    independent set.
    """
    probs = [float(p) for p in g.vertex_prob]
    pos = [v for v in range(g.size) if probs[v] > 0]
    zero = [v for v in range(g.size) if probs[v] <= 0]
    check_budget("exact coloring vertices", len(pos), budget.exact_cap)
    limit = budget.coloring_search if node_limit is None else node_limit

    seed = greedy_mis_coloring(g, budget)
    seed_col = refine_coloring(g, seed.coloring)
    best = {"H": seed_col.entropy(probs), "col": seed_col}
    nodes = 0

    def record(classes):
        col = _assignment_from_classes(g, classes, zero)
        h = col.entropy(probs)
        if h < best["H"] - TIE_TOL or (
                h <= best["H"] + TIE_TOL and col.assignment < best["col"].assignment):
            best["H"], best["col"] = h, col

    def rec(remaining: int, classes: list[int], h_fixed: float, last: float) -> None:
        nonlocal nodes
        nodes += 1
        if nodes > limit:
            raise _NodeLimit
        if not remaining:
            record(classes)
            return
        cands = [(s, _mass(s, probs)) for s in enumerate_mis(g.adj, remaining)]
        top = max(w for _, w in cands)
        rest = _mass(remaining, probs)
        if h_fixed + _packing_bound(rest, min(last, top)) > best["H"] + TIE_TOL:
            return
        cands.sort(key=lambda sw: (-sw[1], bits(sw[0])))
        for s, w in cands:
            if w > last + TIE_TOL:
                continue
            h = h_fixed - w * math.log2(w)
            rec(remaining & ~s, classes + [s], h, w)

    optimal = True
    try:
        rec(sum(1 << v for v in pos), [], 0.0, math.inf)
    except _NodeLimit:
        optimal = False
    col = best["col"]
    return ColoringSearchReport(col, col.entropy(probs), "exact", nodes, optimal)


def min_entropy_coloring_nonzero_case(g: Graph) -> ColoringSearchReport:
    """Optimal when the complement is a disjoint union of cliques: color by
    complement components."""
    comps = g.complement_components()
    for comp in comps:
        mask = sum(1 << v for v in comp)
        if any(g.adj[v] & mask for v in comp):
            return ColoringSearchReport(None, math.nan, "nonzero-case", 0, False, False)
    assign = [0] * g.size
    for c, comp in enumerate(comps):
        for v in comp:
            assign[v] = c
    col = Coloring.canonical(assign)
    return ColoringSearchReport(col, col.entropy(g.vertex_prob), "nonzero-case", 0, True)


def min_entropy_coloring_quantization(scenario: Scenario, i: int = 0,
                                      function: int = 0) -> ColoringSearchReport:
    """One color per block of the region partition of source 1 (or of source 2
    via the transposed scenario when ``i == 1``)."""
    from .core import make_scenario  # local import to keep module graph flat

    if i == 1:
        spec = scenario.functions[function]
        table = np.asarray(scenario.full_table(function)).T
        scenario = make_scenario(scenario.alphabets[::-1], scenario.pmf.T,
                                 [{"name": spec.name, "table": table}])
        function = 0
    ra = extract_function_regions(scenario, function)
    g = characteristic_graph(scenario, 0, function)
    assign = [0] * g.size
    for b, block in enumerate(ra.x1_blocks):
        for a in block:
            assign[a] = b
    col = Coloring.canonical(assign)
    ok = ra.is_quantization and ra.all_proper
    return ColoringSearchReport(col, col.entropy(g.vertex_prob), "quantization-case",
                                0, ok, ok)


def chromatic_entropy(g: Graph, eps: float = 0.0, budget: Budget = DEFAULT_BUDGET
                      ) -> tuple[float, Coloring, Graph]:
    """Minimum coloring entropy over eps-colorings, measured under the
    distribution renormalized to the retained vertices."""
    from .chargraph import epsilon_restrict

    h = epsilon_restrict(g, eps)
    total = float(h.vertex_prob.sum())
    h = Graph(h.vertices, h.edges, h.vertex_prob / total, h.removed_mass, h.kept)
    rep = min_entropy_coloring_exact(h, budget)
    return rep.entropy, rep.coloring, h


def color_graph(g: Graph, strategy: str = "exact", budget: Budget = DEFAULT_BUDGET
                ) -> ColoringSearchReport:
    """Dispatch by strategy name; falls back to greedy above the exact cap."""
    npos = int((g.vertex_prob > 0).sum())
    if strategy == "trivial":
        col = Coloring.trivial(g.size)
        return ColoringSearchReport(col, col.entropy(g.vertex_prob), "trivial", 0, False)
    if strategy == "special":
        rep = min_entropy_coloring_nonzero_case(g)
        if rep.applicable:
            return rep
        strategy = "exact"
    if strategy == "exact" and npos <= budget.exact_cap:
        return min_entropy_coloring_exact(g, budget)
    if strategy in ("exact", "greedy"):
        rep = greedy_mis_coloring(g, budget)
        return rep
    raise ValueError(f"unknown coloring strategy {strategy!r}")
