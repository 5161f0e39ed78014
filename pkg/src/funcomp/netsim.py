"""End-to-end coding plans on (completed) tree networks and their simulation.

A plan assigns every non-receiver node of the completed tree a coloring of
its input values.  Leaves color n-sequences of their source using the power
characteristic graph; an intermediate node colors the tuples of colors it
receives, using the characteristic graph of that tuple variable at its stage
(other nodes of the stage held at their own inputs).  After each stage the
tuple of stage outputs is checked for C.C.C.; on a violation one input value
of the first node that separates the witness pair gets a fresh color, which
keeps every coloring valid and terminates at the trivial coloring at worst.
"""
from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field
from typing import Hashable, Sequence

import numpy as np

from .ccc import (JointSupport, NotCCCError, build_lookup, joint_coloring_family,
                  satisfies_ccc)
from .chargraph import characteristic_graph, power_graph
from .coloring import Coloring, color_graph, is_valid_coloring
from .core import DEFAULT_BUDGET, Budget, BudgetError, Scenario, block_extend, mass_entropy
from .tree import CompletedTree, complete_tree, star_tree

STRATEGIES = ("exact", "special", "greedy", "trivial")


def huffman_lengths(probs: Sequence[float]) -> list[int]:
    """Codeword lengths of a binary Huffman code; one symbol gets length 0."""
    live = [(p, i) for i, p in enumerate(probs) if p > 0]
    lengths = [0] * len(probs)
    if len(live) <= 1:
        return lengths
    heap = [(p, i, [i]) for p, i in live]
    heapq.heapify(heap)
    tick = len(probs)
    while len(heap) > 1:
        p1, _, a = heapq.heappop(heap)
        p2, _, b = heapq.heappop(heap)
        for s in a + b:
            lengths[s] += 1
        heapq.heappush(heap, (p1 + p2, tick, a + b))
        tick += 1
    return lengths


@dataclass(eq=False)
class NodeCode:
    name: str
    stage: int
    link: str | None
    children: list[str]
    labels: list[tuple]        # input value index -> label (sequence or color tuple)
    coloring: list[int]        # input value index -> output color
    method: str
    repairs: int = 0

    @property
    def num_colors(self) -> int:
        return max(self.coloring) + 1 if self.coloring else 0


@dataclass(eq=False)
class CodingPlan:
    scenario: Scenario
    n: int
    strategy: str
    tree: CompletedTree
    nodes: dict[str, NodeCode]
    lookup: dict[tuple, Hashable]
    decodable: bool
    ccc_ok: dict[int, bool]               # stage -> C.C.C. after repair
    rates: dict[str, float]               # node -> analytic bits/symbol
    block_points: np.ndarray = field(repr=False)
    block_probs: np.ndarray = field(repr=False)
    fvals: tuple = field(repr=False)

    def outputs(self, m: int) -> dict[str, int]:
        """Color emitted by every node for block support point m."""
        out: dict[str, int] = {}
        row = self.block_points[m]
        for v in self.tree.postorder():
            if v == self.tree.receiver:
                continue
            node = self.nodes[v]
            if v in self.tree.leaf_source:
                idx = int(row[self.tree.leaf_source[v]])
            else:
                idx = self._index[v][tuple(out[c] for c in node.children)]
            out[v] = node.coloring[idx]
        return out

    def decode(self, m: int):
        out = self.outputs(m)
        key = tuple(out[v] for v in self.tree.stage(1))
        return self.lookup.get(key), out

    @property
    def _index(self) -> dict[str, dict[tuple, int]]:
        cache = self.__dict__.get("_idx_cache")
        if cache is None:
            cache = {v: {lab: i for i, lab in enumerate(nd.labels)}
                     for v, nd in self.nodes.items()}
            self.__dict__["_idx_cache"] = cache
        return cache

    def actual_link_rates(self) -> dict[str, float]:
        """Rate of each original link: minimum over its auxiliary chain."""
        out: dict[str, float] = {}
        for v, r in self.rates.items():
            link = self.tree.link_map.get(v)
            if link is None:
                continue
            out[link] = min(out.get(link, math.inf), r)
        return out

    def render(self) -> str:
        lines = [f"scenario: {self.scenario.name or self.scenario.digest()}",
                 f"n: {self.n}", f"strategy: {self.strategy}",
                 f"decodable: {'yes' if self.decodable else 'no'}"]
        for v in sorted(self.nodes, key=lambda v: (self.tree.depth[v], self.tree.stage(self.tree.depth[v]).index(v))):
            nd = self.nodes[v]
            lines.append(f"{self.tree.link_label(v)} {v}: colors {nd.num_colors}, "
                         f"rate {self.rates[v]:.6f}, method {nd.method}, repairs {nd.repairs}")
        lines.append(f"lookup rows: {len(self.lookup)}")
        return "\n".join(lines)


def _fvals(block, function: int):
    fv = block.function_values(function)
    return tuple(v[0] for v in fv) if block.n == 1 else tuple(fv)


def _cut_support(inputs: list[np.ndarray], sizes: list[int], probs, fvals) -> tuple[JointSupport, np.ndarray]:
    """Deduplicated support over stage inputs; also maps block points to rows."""
    pts = np.stack(inputs, axis=1)
    rows, inv = np.unique(pts, axis=0, return_inverse=True)
    inv = inv.ravel()
    p = np.bincount(inv, weights=probs, minlength=len(rows))
    fv = [None] * len(rows)
    for m, r in enumerate(inv):
        if fv[r] is None:
            fv[r] = fvals[m]
    values = tuple(tuple((j,) for j in range(s)) for s in sizes)
    return JointSupport(values, rows.astype(np.int64), p, tuple(fv)), inv


def build_plan(scenario: Scenario, n: int = 1, strategy: str = "exact", *,
               relay: bool = False, repair: bool = True, function: int = 0,
               colorings: dict[int, Sequence[int]] | None = None,
               budget: Budget = DEFAULT_BUDGET) -> CodingPlan:
    """Build a coding plan on the completed tree of ``scenario``.

    ``colorings`` optionally fixes the leaf coloring per source index;
    ``relay`` makes intermediate nodes forward their inputs unchanged;
    ``repair=False`` skips the C.C.C. adjustment (used to exhibit failures).
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"strategy must be one of {STRATEGIES}")
    tree = complete_tree(scenario.tree or star_tree(scenario.k))
    block = block_extend(scenario, n, budget)
    fvals = _fvals(block, function)
    probs = block.probs
    nodes: dict[str, NodeCode] = {}
    inp: dict[str, np.ndarray] = {}
    out: dict[str, np.ndarray] = {}
    ccc_ok: dict[int, bool] = {}

    for stage in range(tree.d_max, 0, -1):
        members = tree.stage(stage)
        # inputs of every node at this stage
        for v in members:
            if v in tree.leaf_source:
                s = tree.leaf_source[v]
                inp[v] = block.points[:, s].copy()
                nodes[v] = NodeCode(v, stage, tree.link_map.get(v), [],
                                    [tuple(q) for q in block.sequences[s]], [], "")
            else:
                kids = tree.children(v)
                tup = np.stack([out[c] for c in kids], axis=1)
                labels, idx = np.unique(tup, axis=0, return_inverse=True)
                inp[v] = idx.ravel()
                nodes[v] = NodeCode(v, stage, tree.link_map.get(v), kids,
                                    [tuple(int(x) for x in lab) for lab in labels], [], "")
        sizes = [len(nodes[v].labels) for v in members]
        cut, _ = _cut_support([inp[v] for v in members], sizes, probs, fvals)

        for j, v in enumerate(members):
            nd = nodes[v]
            if v in tree.leaf_source:
                s = tree.leaf_source[v]
                g = characteristic_graph(scenario, s, function)
                if n > 1:
                    g = power_graph(g, n, block.marginal(s), budget)
                if colorings is not None and s in colorings:
                    col = Coloring.canonical(colorings[s])
                    nd.method = "given"
                else:
                    rep = color_graph(g, strategy, budget)
                    col, nd.method = rep.coloring, rep.method
                ok, bad = is_valid_coloring(g, col)
                if not ok:
                    raise ValueError(f"coloring of source {s + 1} is invalid at edge {bad}")
            else:
                g = cut.graph(j)
                if relay or strategy == "trivial":
                    col, nd.method = Coloring.trivial(g.size), "relay"
                else:
                    rep = color_graph(g, strategy, budget)
                    col, nd.method = rep.coloring, rep.method
            nd.coloring = list(col.assignment)

        # C.C.C. at this cut, repairing one value at a time
        while True:
            fam = joint_coloring_family([nodes[v].coloring for v in members], cut)
            res = satisfies_ccc(fam)
            if res.ok or not repair:
                ccc_ok[stage] = res.ok
                break
            a, b = res.witness.point_a, res.witness.point_b
            j = next(j for j in range(len(members)) if cut.points[a, j] != cut.points[b, j])
            nd = nodes[members[j]]
            nd.coloring[int(cut.points[b, j])] = max(nd.coloring) + 1
            nd.coloring = list(Coloring.canonical(nd.coloring).assignment)
            nd.repairs += 1
        for v in members:
            out[v] = np.asarray(nodes[v].coloring, dtype=np.int64)[inp[v]]

    first = tree.stage(1)
    keys = [tuple(int(out[v][m]) for v in first) for m in range(len(probs))]
    lookup: dict[tuple, Hashable] = {}
    decodable = True
    for key, f in zip(keys, fvals):
        if key in lookup and lookup[key] != f:
            decodable = False
        lookup.setdefault(key, f)
    rates = {v: mass_entropy(np.bincount(out[v], weights=probs)) / n for v in nodes}
    return CodingPlan(scenario, n, strategy, tree, nodes, lookup, decodable, ccc_ok, rates,
                      block.points, probs, fvals)


def plan_from_colorings(scenario: Scenario, colorings: Sequence[Sequence[int]], n: int = 1,
                        repair: bool = False, budget: Budget = DEFAULT_BUDGET) -> CodingPlan:
    """One-stage plan with the given source colorings (no repair by default)."""
    return build_plan(scenario.__class__(scenario.alphabets, scenario.pmf, scenario.functions,
                                         None, scenario.distortion, scenario.labels,
                                         scenario.name),
                      n, "exact", repair=repair,
                      colorings={i: c for i, c in enumerate(colorings)}, budget=budget)


# ---------------------------------------------------------------------------
# Simulation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LinkReport:
    label: str
    node: str
    link: str | None
    rate: float
    empirical: float
    bound: float | None
    bound_label: str


@dataclass(frozen=True)
class SimReport:
    scenario: str
    n: int
    mode: str
    seed: int | None
    trials: int
    errors: int
    error_mass: float
    links: tuple[LinkReport, ...]
    max_distortion: float | None = None
    mean_distortion: float | None = None
    feedback: dict | None = None
    scenario_hash: str = ""

    def render(self) -> str:
        lines = [f"scenario: {self.scenario}"]
        if self.scenario_hash:
            lines.append(f"hash: {self.scenario_hash}")
        lines += [f"n: {self.n}", f"mode: {self.mode}"]
        if self.seed is not None:
            lines.append(f"seed: {self.seed}")
        lines.append(f"errors: {self.errors}/{self.trials}")
        for lk in self.links:
            bound = "n/a" if lk.bound is None else f"{lk.bound:.6f}"
            actual = f" link {lk.link}" if lk.link else " (virtual)"
            lines.append(f"{lk.label} {lk.node}{actual}: rate {lk.rate:.6f}, "
                         f"empirical {lk.empirical:.6f}, bound {bound} [{lk.bound_label}]")
        if self.max_distortion is not None:
            lines.append(f"max distortion: {self.max_distortion:.6f}")
            lines.append(f"mean distortion: {self.mean_distortion:.6f}")
        if self.feedback:
            for key in sorted(self.feedback):
                val = self.feedback[key]
                lines.append(f"{key}: {val:.6f}" if isinstance(val, float) else f"{key}: {val}")
        return "\n".join(lines)

    def to_dict(self) -> dict:
        d = {"scenario": self.scenario, "hash": self.scenario_hash, "n": self.n,
             "mode": self.mode, "seed": self.seed, "trials": self.trials, "errors": self.errors, "error_mass": self.error_mass,
             "links": [lk.__dict__ for lk in self.links]}
        if self.max_distortion is not None:
            d["max_distortion"] = self.max_distortion
            d["mean_distortion"] = self.mean_distortion
        if self.feedback:
            d["feedback"] = self.feedback
        return d


def _sample(probs: np.ndarray, mode: str, trials: int, seed: int | None):
    if mode == "exhaustive":
        return np.arange(len(probs)), probs
    if mode != "sampled":
        raise ValueError("mode must be 'exhaustive' or 'sampled'")
    rng = np.random.default_rng(seed)
    idx = rng.choice(len(probs), size=trials, p=probs / probs.sum())
    return idx, np.full(trials, 1.0 / trials)


def simulate(plan: CodingPlan, mode: str = "exhaustive", trials: int = 1000,
             seed: int | None = 0, bounds: bool = True,
             budget: Budget = DEFAULT_BUDGET) -> SimReport:
    """Run block inputs through encoders, intermediate nodes and the lookup."""
    idx, weights = _sample(plan.block_probs, mode, trials, seed)
    outs = [plan.outputs(int(m)) for m in range(len(plan.block_probs))]
    first = plan.tree.stage(1)
    errors, err_mass = 0, 0.0
    for m, w in zip(idx, weights):
        key = tuple(outs[m][v] for v in first)
        if plan.lookup.get(key) != plan.fvals[m]:
            errors += 1
            err_mass += float(w)

    region = None
    if bounds:
        from .graph_entropy import rate_lower_bound_tree
        try:
            region = rate_lower_bound_tree(plan.scenario, plan.n, budget, partial=True)
        except BudgetError:
            region = None
    links = []
    for v in sorted(plan.nodes, key=lambda v: (plan.tree.depth[v], plan.tree.stage(plan.tree.depth[v]).index(v))):
        colors = np.array([outs[m][v] for m in range(len(plan.block_probs))])
        dist = np.bincount(colors, weights=plan.block_probs)
        lengths = np.array(huffman_lengths(dist))
        emp = float((weights * lengths[colors[idx]]).sum()) / plan.n
        stage = plan.tree.depth[v]
        j = plan.tree.stage(stage).index(v) + 1
        bound, blabel = None, "unavailable"
        if region is not None:
            q = next(q for q in region.inequalities if q.stage == stage and q.links == (j,))
            bound, blabel = (q.bound if q.available else None), q.label
        links.append(LinkReport(plan.tree.link_label(v), v, plan.tree.link_map.get(v),
                                plan.rates[v], emp, bound, blabel))
    return SimReport(plan.scenario.name or plan.scenario.digest(), plan.n, mode,
                     None if mode == "exhaustive" else seed, len(idx), errors, err_mass,
                     tuple(links), scenario_hash=plan.scenario.digest())
