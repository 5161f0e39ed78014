"""Characteristic graphs and the graphs derived from them.

Vertices are symbol tuples (an n-sequence per vertex, n=1 for base graphs)
kept in lexicographic order.  Edges are stored as index pairs ``(i, j)`` with
``i < j``; an adjacency bitmask per vertex is derived lazily for the search
routines in :mod:`funcomp.coloring` and :mod:`funcomp.graph_entropy`.
"""
from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable, Sequence

import numpy as np

from .core import DEFAULT_BUDGET, Budget, Scenario, ScenarioError, check_budget

EPS_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Graph:
    vertices: tuple[tuple[int, ...], ...]
    edges: frozenset[tuple[int, int]]
    vertex_prob: np.ndarray
    removed_mass: float = 0.0
    kept: tuple[int, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        nv = len(self.vertices)
        for i, j in self.edges:
            if not (0 <= i < j < nv):
                raise ValueError(f"bad edge {(i, j)} for {nv} vertices")
        if len(self.vertex_prob) != nv:
            raise ValueError("vertex_prob length must match vertex count")

    @classmethod
    def build(cls, vertices, edges: Iterable[tuple[int, int]], probs, **kw) -> "Graph":
        es = frozenset((min(i, j), max(i, j)) for i, j in edges if i != j)
        return cls(tuple(tuple(v) for v in vertices), es,
                   np.asarray(probs, dtype=np.float64), **kw)

    @property
    def size(self) -> int:
        return len(self.vertices)

    @property
    def n(self) -> int:
        return len(self.vertices[0]) if self.vertices else 0

    @cached_property
    def adj(self) -> tuple[int, ...]:
        masks = [0] * self.size
        for i, j in self.edges:
            masks[i] |= 1 << j
            masks[j] |= 1 << i
        return tuple(masks)

    @cached_property
    def adjacency_matrix(self) -> np.ndarray:
        m = np.zeros((self.size, self.size), dtype=bool)
        for i, j in self.edges:
            m[i, j] = m[j, i] = True
        return m

    def has_edge(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self.edges

    def neighbors(self, i: int) -> list[int]:
        return bits(self.adj[i])

    def index(self, vertex: Sequence[int]) -> int:
        return self._index[tuple(vertex)]

    @cached_property
    def _index(self) -> dict[tuple[int, ...], int]:
        return {v: i for i, v in enumerate(self.vertices)}

    def induced(self, keep: Sequence[int], removed_mass: float | None = None) -> "Graph":
        keep = sorted(keep)
        pos = {v: i for i, v in enumerate(keep)}
        edges = [(pos[i], pos[j]) for i, j in self.edges if i in pos and j in pos]
        rm = self.removed_mass if removed_mass is None else removed_mass
        base = self.kept
        kept = tuple(base[i] for i in keep) if base is not None else tuple(keep)
        return Graph.build([self.vertices[i] for i in keep], edges,
                           self.vertex_prob[keep], removed_mass=rm, kept=kept)

    def complement_components(self) -> list[list[int]]:
        """Connected components of the complement graph, in vertex order."""
        full = (1 << self.size) - 1
        seen = 0
        comps = []
        for start in range(self.size):
            if seen >> start & 1:
                continue
            comp = 1 << start
            frontier = comp
            while frontier:
                v = (frontier & -frontier).bit_length() - 1
                frontier &= frontier - 1
                new = (full & ~self.adj[v] & ~(1 << v)) & ~comp
                comp |= new
                frontier |= new
            seen |= comp
            comps.append(bits(comp))
        return comps

    def to_adjacency_text(self) -> str:
        """One vertex per line: id, probability, neighbor ids."""
        lines = []
        for i, v in enumerate(self.vertices):
            nbrs = " ".join(str(j) for j in self.neighbors(i))
            label = ",".join(str(s) for s in v)
            lines.append(f"{i} ({label}) {self.vertex_prob[i]:.6f} : {nbrs}".rstrip())
        return "\n".join(lines)


def bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------


def _move_first(arr: np.ndarray, axis: int) -> np.ndarray:
    return np.moveaxis(arr, axis, 0).reshape(arr.shape[axis], -1)


def _pair_graph(pmf: np.ndarray, distinct: np.ndarray, i: int) -> tuple[list, np.ndarray]:
    """Edges for source ``i`` given a per-context 'must distinguish' tensor.

    ``distinct[a, b, r]`` is true when symbols a and b need different colors
    in context r (ignoring probability).
    """
    P = _move_first(pmf, i) > 0
    both = P[:, None, :] & P[None, :, :]
    adj = np.any(both & distinct, axis=2)
    a = pmf.shape[i]
    edges = [(x, y) for x in range(a) for y in range(x + 1, a) if adj[x, y]]
    return edges, _move_first(pmf, i).sum(axis=1)


def characteristic_graph(scenario: Scenario, i: int, function: int = 0) -> Graph:
    """Graph on the alphabet of source ``i``: a and b are adjacent when some
    context of the other sources has positive probability with both and gives
    different function values."""
    if not 0 <= i < scenario.k:
        raise ScenarioError(f"source index {i} out of range")
    F = _move_first(np.asarray(scenario.full_table(function)), i)
    distinct = F[:, None, :] != F[None, :, :]
    edges, probs = _pair_graph(scenario.pmf, distinct, i)
    return Graph.build([(a,) for a in range(scenario.alphabets[i])], edges, probs)


def d_characteristic_graph(scenario: Scenario, i: int, D: float, function: int = 0) -> Graph:
    """Characteristic graph where a and b are adjacent only if the function
    values they produce in a shared context are more than D apart."""
    if scenario.distortion is None:
        raise ScenarioError("distortion: table required for D-characteristic graphs")
    if D < 0:
        raise ValueError("D must be non-negative")
    F = _move_first(np.asarray(scenario.full_table(function)), i)
    dist = scenario.distortion[F[:, None, :], F[None, :, :]]
    edges, probs = _pair_graph(scenario.pmf, dist > D + EPS_TOL, i)
    return Graph.build([(a,) for a in range(scenario.alphabets[i])], edges, probs)


def multi_functional_graph(scenario: Scenario, functions: Sequence[int] | None = None,
                           source: int = 0) -> Graph:
    """Union of the characteristic graphs of ``source`` over several functions,
    each function seeing its own side-information sources through ``args``."""
    functions = list(range(len(scenario.functions))) if functions is None else list(functions)
    if not functions:
        raise ValueError("at least one function is required")
    edges: set[tuple[int, int]] = set()
    probs = None
    for j in functions:
        spec = scenario.functions[j]
        if source not in spec.args:
            raise ScenarioError(
                f"functions[{j}] ({spec.name}) is not defined over source {source}")
        g = characteristic_graph(scenario, source, j)
        edges |= g.edges
        probs = g.vertex_prob
    return Graph.build([(a,) for a in range(scenario.alphabets[source])], edges, probs)


def power_graph(g: Graph, n: int, block_probs: np.ndarray | None = None,
                budget: Budget = DEFAULT_BUDGET) -> Graph:
    """n-th OR-power: sequences adjacent when some coordinate pair is adjacent.

    Vertex probabilities default to the i.i.d. product of ``g.vertex_prob``;
    ``block_probs`` overrides them (e.g. block marginals of correlated sources).
    """
    if g.n != 1:
        raise ValueError("power_graph expects a base (n=1) graph")
    a = g.size
    check_budget("power graph vertices", a ** n, budget.graph_vertices)
    seqs = list(itertools.product(range(a), repeat=n))
    S = np.array(seqs, dtype=np.int64).reshape(len(seqs), n)
    A = g.adjacency_matrix
    adj = np.zeros((len(seqs), len(seqs)), dtype=bool)
    for t in range(n):
        adj |= A[S[:, t][:, None], S[:, t][None, :]]
    iu, ju = np.nonzero(np.triu(adj, 1))
    if block_probs is None:
        probs = np.prod(g.vertex_prob[S], axis=1)
    else:
        probs = np.asarray(block_probs, dtype=np.float64)
    verts = [tuple(g.vertices[s][0] for s in seq) for seq in seqs]
    return Graph.build(verts, zip(iu.tolist(), ju.tolist()), probs)


def epsilon_restrict(g: Graph, eps: float) -> Graph:
    """Drop lowest-probability vertices while their total mass stays <= eps."""
    if not 0 <= eps < 1:
        raise ValueError("eps must satisfy 0 <= eps < 1")
    if eps == 0:
        return g
    order = sorted(range(g.size), key=lambda v: (g.vertex_prob[v], v))
    removed, mass = [], 0.0
    for v in order:
        p = float(g.vertex_prob[v])
        if mass + p > eps + EPS_TOL:
            break
        removed.append(v)
        mass += p
    if len(removed) == g.size:  # never empty the graph
        removed.pop()
        mass = float(g.vertex_prob[removed].sum()) if removed else 0.0
    keep = [v for v in range(g.size) if v not in set(removed)]
    return g.induced(keep, removed_mass=g.removed_mass + mass)


def support_graph(values: Sequence[tuple], points: np.ndarray, probs: np.ndarray,
                  fvals: Sequence[Hashable], coord: int) -> Graph:
    """Characteristic graph of coordinate ``coord`` of an explicit support.

    ``points[m]`` holds value indices per coordinate, ``values`` lists the
    labels of coordinate ``coord``.  Two values are adjacent when two support
    points agree on every other coordinate but carry different function values.
    This covers grouped super-sources and block (n>1) variables alike.
    """
    groups: dict[tuple, list[int]] = defaultdict(list)
    rest = np.delete(points, coord, axis=1)
    for m, key in enumerate(map(tuple, rest)):
        groups[key].append(m)
    edges = set()
    for members in groups.values():
        for x, y in itertools.combinations(members, 2):
            a, b = int(points[x, coord]), int(points[y, coord])
            if a != b and fvals[x] != fvals[y]:
                edges.add((min(a, b), max(a, b)))
    vp = np.bincount(points[:, coord], weights=probs, minlength=len(values))
    return Graph.build(values, edges, vp)


# ---------------------------------------------------------------------------
# Function regions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FunctionRegion:
    x1_set: tuple[int, ...]
    x2_set: tuple[int, ...]
    value: int


@dataclass(frozen=True, eq=False)
class RegionAnalysis:
    regions: tuple[FunctionRegion, ...]
    x1_blocks: tuple[tuple[int, ...], ...]
    x2_blocks: tuple[tuple[int, ...], ...]
    is_quantization: bool
    proper: np.ndarray  # proper[b1, b2] over x1 blocks

    @property
    def all_proper(self) -> bool:
        nb = len(self.x1_blocks)
        return all(self.proper[a, b] for a in range(nb) for b in range(nb) if a != b)


def _runs(table: np.ndarray) -> list[tuple[int, ...]]:
    """Maximal runs of consecutive identical rows."""
    blocks, cur = [], [0]
    for r in range(1, table.shape[0]):
        if np.array_equal(table[r], table[r - 1]):
            cur.append(r)
        else:
            blocks.append(tuple(cur))
            cur = [r]
    blocks.append(tuple(cur))
    return blocks


def _is_interval(xs: Sequence[int]) -> bool:
    return max(xs) - min(xs) + 1 == len(xs)


def is_quantization_function(table: np.ndarray) -> bool:
    """Each value's preimage is a product of two contiguous intervals."""
    for v in np.unique(table):
        rows, cols = np.nonzero(table == v)
        r, c = sorted(set(rows.tolist())), sorted(set(cols.tolist()))
        if not (_is_interval(r) and _is_interval(c)):
            return False
        if len(rows) != len(r) * len(c):
            return False
    return True


def extract_function_regions(scenario: Scenario, function: int = 0) -> RegionAnalysis:
    if scenario.k != 2:
        raise ScenarioError("function regions are defined for two sources")
    F = np.asarray(scenario.full_table(function))
    quant = is_quantization_function(F)
    if quant:
        b1, b2 = _runs(F), _runs(F.T)
        regions = []
        for v in np.unique(F):
            rows, cols = np.nonzero(F == v)
            regions.append(FunctionRegion(tuple(sorted(set(rows.tolist()))),
                                          tuple(sorted(set(cols.tolist()))), int(v)))
    else:
        b1 = [(a,) for a in range(F.shape[0])]
        b2 = [(b,) for b in range(F.shape[1])]
        regions = [FunctionRegion((a,), (b,), int(F[a, b]))
                   for a in range(F.shape[0]) for b in range(F.shape[1])]
    g = characteristic_graph(scenario, 0, function)
    nb = len(b1)
    proper = np.zeros((nb, nb), dtype=bool)
    for p, q in itertools.product(range(nb), repeat=2):
        if p != q:
            proper[p, q] = all(g.has_edge(a, b) for a in b1[p] for b in b1[q])
    return RegionAnalysis(tuple(regions), tuple(b1), tuple(b2), quant, proper)
