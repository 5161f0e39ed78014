"""Joint coloring families and the coloring connectivity condition (C.C.C.).

Everything here works on a :class:`JointSupport`: a list of positive
probability points, each holding one value index per coordinate plus a
hashable function value.  Coordinates are sources at n=1, n-blocks of
sources, or grouped super-sources; the checks do not care which.
"""
from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass
from typing import Hashable, Sequence

import numpy as np

from .chargraph import Graph, power_graph, characteristic_graph, support_graph
from .core import DEFAULT_BUDGET, Budget, Scenario, block_extend


class InvalidColoringError(ValueError):
    """A one-coordinate step inside a class changed the function value."""


class NotCCCError(ValueError):
    """A decoder table was requested for a family that violates C.C.C."""


@dataclass(frozen=True, eq=False)
class JointSupport:
    values: tuple[tuple[tuple, ...], ...]  # per coordinate: index -> label
    points: np.ndarray                     # (m, k) value indices
    probs: np.ndarray
    fvals: tuple[Hashable, ...]
    n: int = 1

    @property
    def k(self) -> int:
        return self.points.shape[1]

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(v) for v in self.values)

    def marginal(self, i: int) -> np.ndarray:
        return np.bincount(self.points[:, i], weights=self.probs, minlength=len(self.values[i]))

    def graph(self, i: int) -> Graph:
        """Characteristic graph of coordinate i over this support."""
        return support_graph(self.values[i], self.points, self.probs, self.fvals, i)

    @classmethod
    def from_scenario(cls, scenario: Scenario, n: int = 1, function: int = 0,
                      groups: Sequence[Sequence[int]] | None = None,
                      budget: Budget = DEFAULT_BUDGET) -> "JointSupport":
        """Support of the n-block extension.

        Singleton coordinates range over every n-sequence of their source (in
        lexicographic order, matching :func:`power_graph`); grouped
        coordinates range over the tuples that occur in the support.
        """
        block = block_extend(scenario, n, budget)
        fv = block.function_values(function)
        if n == 1:
            fv = [v[0] for v in fv]
        groups = [[i] for i in range(scenario.k)] if groups is None else [list(g) for g in groups]
        values, cols = [], []
        for grp in groups:
            if len(grp) == 1:
                i = grp[0]
                values.append(tuple(block.sequences[i]))
                cols.append(block.points[:, i])
            else:
                proj = [tuple(int(x) for x in row) for row in block.points[:, grp]]
                labels = sorted(set(proj))
                pos = {t: j for j, t in enumerate(labels)}
                values.append(tuple(labels))
                cols.append(np.array([pos[t] for t in proj], dtype=np.int64))
        pts = np.stack(cols, axis=1) if cols else np.zeros((len(block.probs), 0), np.int64)
        return cls(tuple(values), pts, block.probs, tuple(fv), n)

    def dedupe(self) -> "JointSupport":
        """Merge identical points (needed after coarsening coordinates)."""
        acc: dict[tuple, list] = {}
        for row, p, f in zip(map(tuple, self.points), self.probs, self.fvals):
            if row in acc:
                acc[row][0] += p
                if acc[row][1] != f:
                    raise InvalidColoringError(f"point {row} carries two function values")
            else:
                acc[row] = [p, f]
        rows = sorted(acc)
        pts = np.array(rows, dtype=np.int64).reshape(len(rows), self.k)
        return JointSupport(self.values, pts, np.array([acc[r][0] for r in rows]),
                            tuple(acc[r][1] for r in rows), self.n)


def source_graphs(scenario: Scenario, n: int = 1, function: int = 0,
                  budget: Budget = DEFAULT_BUDGET) -> list[Graph]:
    """n-th power characteristic graphs of every source, block marginals attached."""
    graphs = []
    block = block_extend(scenario, n, budget) if n > 1 else None
    for i in range(scenario.k):
        g = characteristic_graph(scenario, i, function)
        if n > 1:
            g = power_graph(g, n, block.marginal(i), budget)
        graphs.append(g)
    return graphs


# ---------------------------------------------------------------------------
# Families
# ---------------------------------------------------------------------------


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


@dataclass(frozen=True)
class JointColoringClass:
    colors: tuple[int, ...]
    members: tuple[int, ...]             # point indices, ascending
    components: tuple[tuple[int, ...], ...]


@dataclass(frozen=True, eq=False)
class JointColoringFamily:
    support: JointSupport
    colorings: tuple[tuple[int, ...], ...]
    classes: tuple[JointColoringClass, ...]

    def class_of(self, colors: tuple[int, ...]) -> JointColoringClass:
        return self._index[tuple(colors)]

    @property
    def _index(self):
        return {c.colors: c for c in self.classes}

    def color_tuple(self, point: int) -> tuple[int, ...]:
        row = self.support.points[point]
        return tuple(col[v] for col, v in zip(self.colorings, row))

    def color_distribution(self) -> np.ndarray:
        return np.array([self.support.probs[list(c.members)].sum() for c in self.classes])


def _as_tuple(c) -> tuple[int, ...]:
    return tuple(c.assignment) if hasattr(c, "assignment") else tuple(int(x) for x in c)


def joint_coloring_family(colorings: Sequence, support: JointSupport) -> JointColoringFamily:
    """Group support points by color tuple; components use one-coordinate steps."""
    cols = tuple(_as_tuple(c) for c in colorings)
    if len(cols) != support.k:
        raise ValueError(f"need {support.k} colorings, got {len(cols)}")
    for i, col in enumerate(cols):
        if len(col) != len(support.values[i]):
            raise ValueError(f"coloring {i} is not total on the symbols of coordinate {i}")
    by_color: dict[tuple, list[int]] = defaultdict(list)
    for m, row in enumerate(support.points):
        by_color[tuple(col[v] for col, v in zip(cols, row))].append(m)
    classes = []
    for colors in sorted(by_color):
        members = by_color[colors]
        uf = _UnionFind(len(members))
        for i in range(support.k):
            buckets: dict[tuple, int] = {}
            for local, m in enumerate(members):
                key = tuple(np.delete(support.points[m], i))
                if key in buckets:
                    uf.union(buckets[key], local)
                else:
                    buckets[key] = local
        comps: dict[int, list[int]] = defaultdict(list)
        for local, m in enumerate(members):
            comps[uf.find(local)].append(m)
        ordered = tuple(sorted(tuple(c) for c in comps.values()))
        classes.append(JointColoringClass(colors, tuple(members), ordered))
    return JointColoringFamily(support, cols, tuple(classes))


@dataclass(frozen=True)
class CCCWitness:
    colors: tuple[int, ...]
    point_a: int
    point_b: int
    f_a: Hashable
    f_b: Hashable


@dataclass(frozen=True)
class CCCResult:
    ok: bool
    witness: CCCWitness | None = None
    violating: tuple[int, ...] = ()   # indices into family.classes

    def __bool__(self) -> bool:
        return self.ok


def satisfies_ccc(family: JointColoringFamily) -> CCCResult:
    """True when every class is connected or all its components share one
    function value.  The witness is the first violating class (by color
    tuple) and its lexicographically smallest offending point pair."""
    fv = family.support.fvals
    witness, violating = None, []
    for ci, cls in enumerate(family.classes):
        comp_val = []
        for comp in cls.components:
            vals = {fv[m] for m in comp}
            if len(vals) > 1:
                raise InvalidColoringError(
                    f"class {cls.colors}: function varies inside a connected component")
            comp_val.append((fv[comp[0]], comp))
        if len({v for v, _ in comp_val}) <= 1:
            continue
        violating.append(ci)
        if witness is None:
            pairs = []
            for (va, ca), (vb, cb) in itertools.combinations(comp_val, 2):
                if va != vb:
                    a, b = min(ca), min(cb)
                    pairs.append((min(a, b), max(a, b)))
            a, b = min(pairs)
            witness = CCCWitness(cls.colors, a, b, fv[a], fv[b])
    return CCCResult(not violating, witness, tuple(violating))


def build_lookup(family: JointColoringFamily) -> dict[tuple[int, ...], Hashable]:
    """Receiver decoder table: color tuple -> function value.

    Built independently of :func:`satisfies_ccc` by scanning every support
    point; any class carrying two function values is a conflict.
    """
    fv = family.support.fvals
    table: dict[tuple[int, ...], Hashable] = {}
    for m in range(len(fv)):
        key = family.color_tuple(m)
        if key in table and table[key] != fv[m]:
            raise NotCCCError(f"color tuple {key} maps to {table[key]!r} and {fv[m]!r}")
        table.setdefault(key, fv[m])
    return table


def ccc_implies_welldefined(family: JointColoringFamily) -> dict[tuple[int, ...], Hashable]:
    res = satisfies_ccc(family)
    if not res.ok:
        raise NotCCCError(f"family violates C.C.C.: {res.witness}")
    return build_lookup(family)


def check_zigzag(scenario: Scenario) -> bool:
    """Support-level rendering for two sources: for any two support points a
    and b, one of the cross points (a1, b2) or (b1, a2) is in the support."""
    if scenario.k != 2:
        raise ValueError("zigzag check is defined for two sources")
    P = scenario.pmf > 0
    pts = list(zip(*np.nonzero(P)))
    for (a1, a2), (b1, b2) in itertools.combinations(pts, 2):
        if not (P[a1, b2] or P[b1, a2]):
            return False
    return True


def describe_witness(family: JointColoringFamily, w: CCCWitness) -> str:
    vals = family.support.values

    def label(m):
        return "(" + ",".join(",".join(map(str, vals[i][v])) for i, v in
                              enumerate(family.support.points[m])) + ")"

    return (f"class {w.colors}: {label(w.point_a)} f={w.f_a} vs "
            f"{label(w.point_b)} f={w.f_b}")
