"""Tree topologies: validation, completion and per-stage connection sets."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

from .core import ScenarioError, TreeSpec


def star_tree(k: int) -> TreeSpec:
    """Depth-one topology: every source talks to the receiver directly."""
    return TreeSpec("r", {f"x{i + 1}": "r" for i in range(k)},
                    {f"x{i + 1}": (i,) for i in range(k)})


@dataclass(frozen=True)
class CompletedTree:
    receiver: str
    parent: dict[str, str]
    depth: dict[str, int]
    leaf_source: dict[str, int]
    link_map: dict[str, str | None]   # node -> original link it belongs to (None = virtual)
    auxiliary: tuple[str, ...]
    d_max: int

    def children(self, v: str) -> list[str]:
        kids = [c for c, p in self.parent.items() if p == v]
        return sorted(kids, key=self._order_key)

    def xi(self, v: str) -> tuple[int, ...]:
        if v in self.leaf_source:
            return (self.leaf_source[v],)
        return tuple(sorted(s for c in self.children(v) for s in self.xi(c)))

    def _order_key(self, v: str):
        return (min(self.xi(v)), v)

    def stage(self, i: int) -> list[str]:
        nodes = [v for v, d in self.depth.items() if d == i]
        return sorted(nodes, key=self._order_key)

    def connection_set(self) -> list[list[tuple[int, ...]]]:
        """Per stage (1..d_max) the source groups carried by each node."""
        return [[self.xi(v) for v in self.stage(i)] for i in range(1, self.d_max + 1)]

    def link_label(self, v: str) -> str:
        i = self.depth[v]
        j = self.stage(i).index(v) + 1
        return f"R_{{{i},{j}}}"

    def postorder(self) -> list[str]:
        out: list[str] = []

        def walk(v):
            for c in self.children(v):
                walk(c)
            out.append(v)

        walk(self.receiver)
        return out


def _validate(t: TreeSpec) -> set[str]:
    nodes = set(t.parent) | set(t.parent.values()) | set(t.sources) | {t.receiver}
    for v in nodes:
        seen = {v}
        cur = v
        while cur != t.receiver:
            if cur not in t.parent:
                raise ScenarioError(f"tree: node {cur!r} is not connected to the receiver")
            cur = t.parent[cur]
            if cur in seen:
                raise ScenarioError(f"tree: cycle through {cur!r}")
            seen.add(cur)
    return nodes


def complete_tree(t: TreeSpec) -> CompletedTree:
    """Move internal sources onto fake leaves, prune sourceless branches and
    pad short branches with auxiliary relay nodes so every source leaf sits
    at the same depth."""
    nodes = _validate(t)
    parent = dict(t.parent)
    link_map: dict[str, str | None] = {v: v for v in parent}
    leaf_source: dict[str, int] = {}
    kids = defaultdict(list)
    for c, p in parent.items():
        kids[p].append(c)
    for v in sorted(nodes):
        srcs = t.sources.get(v, ())
        if not srcs:
            continue
        if not kids[v] and len(srcs) == 1:
            leaf_source[v] = srcs[0]
            continue
        for s in srcs:
            fake = f"{v}~x{s + 1}"
            parent[fake] = v
            link_map[fake] = None
            leaf_source[fake] = s
    # prune sourceless leaves until stable
    while True:
        has_kid = set(parent.values())
        dead = [v for v in parent if v not in has_kid and v not in leaf_source]
        if not dead:
            break
        for v in dead:
            del parent[v]
            link_map.pop(v, None)

    def depth_of(v):
        d = 0
        while v != t.receiver:
            v = parent[v]
            d += 1
        return d

    d_max = max(depth_of(v) for v in leaf_source)
    aux = []
    for leaf in sorted(leaf_source):
        gap = d_max - depth_of(leaf)
        if gap <= 0:
            continue
        top = parent[leaf]
        prev = leaf
        for j in range(gap):
            name = f"{leaf}+aux{j + 1}"
            parent[prev] = name
            link_map[name] = link_map[leaf]
            aux.append(name)
            prev = name
        parent[prev] = top
    depth = {v: depth_of(v) for v in parent}
    return CompletedTree(t.receiver, parent, depth, leaf_source, link_map, tuple(aux), d_max)
