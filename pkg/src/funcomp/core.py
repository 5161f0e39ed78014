"""Scenario representation, probability tables and Shannon entropy helpers.

A scenario is the single input artifact of the toolkit: finite alphabets for
``k`` sources, a dense joint pmf, one or more function tables, an optional
tree topology and an optional distortion table.  Symbols are 0-based ints.
"""
from __future__ import annotations

import hashlib
import itertools
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

INPUT_TOL = 1e-9
INTERNAL_TOL = 1e-12


class ScenarioError(ValueError):
    """Invalid scenario data or a violated invariant."""


class BudgetError(RuntimeError):
    """An enumeration or search exceeded its configured budget."""

    def __init__(self, what: str, required: int, allowed: int):
        self.what = what
        self.required = required
        self.allowed = allowed
        super().__init__(f"{what}: required {required}, allowed {allowed}")


@dataclass(frozen=True)
class Budget:
    """Size limits shared by every exhaustive routine."""

    enumeration: int = 2_000_000
    exact_cap: int = 26
    coloring_search: int = 500_000
    graph_vertices: int = 4096

    @classmethod
    def from_env(cls) -> "Budget":
        raw = os.environ.get("FUNCOMP_BUDGET")
        if not raw:
            return cls()
        return cls(enumeration=int(float(raw)))


DEFAULT_BUDGET = Budget()


def check_budget(what: str, required: int, allowed: int) -> None:
    if required > allowed:
        raise BudgetError(what, required, allowed)


# ---------------------------------------------------------------------------
# Scenario
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FunctionSpec:
    """A dense function table over the product of the alphabets in ``args``."""

    name: str
    table: np.ndarray
    args: tuple[int, ...]


@dataclass(frozen=True)
class TreeSpec:
    """Rooted tree: ``parent`` maps each non-receiver node to its parent and
    ``sources`` maps nodes to the source indices they observe."""

    receiver: str
    parent: dict[str, str]
    sources: dict[str, tuple[int, ...]]

    def to_dict(self) -> dict[str, Any]:
        return {
            "receiver": self.receiver,
            "edges": [[child, par] for child, par in self.parent.items()],
            "sources": {node: list(srcs) for node, srcs in self.sources.items()},
        }


@dataclass(frozen=True, eq=False)
class Scenario:
    alphabets: tuple[int, ...]
    pmf: np.ndarray
    functions: tuple[FunctionSpec, ...]
    tree: TreeSpec | None = None
    distortion: np.ndarray | None = None
    labels: dict[str, Any] | None = None
    name: str = ""

    @property
    def k(self) -> int:
        return len(self.alphabets)

    def function(self, index: int = 0) -> FunctionSpec:
        return self.functions[index]

    def full_table(self, index: int = 0) -> np.ndarray:
        """Function table broadcast to the full product alphabet."""
        spec = self.functions[index]
        if spec.args == tuple(range(self.k)):
            return spec.table
        shape = [1] * self.k
        for ax in spec.args:
            shape[ax] = self.alphabets[ax]
        order = np.argsort(spec.args)
        table = np.transpose(spec.table, order).reshape(shape)
        return np.broadcast_to(table, self.alphabets)

    def with_function(self, table: np.ndarray, name: str = "fhat") -> "Scenario":
        table = np.asarray(table, dtype=np.int64).reshape(self.alphabets)
        spec = FunctionSpec(name, table, tuple(range(self.k)))
        return Scenario(self.alphabets, self.pmf, (spec,), self.tree,
                        self.distortion, self.labels, self.name)

    def digest(self) -> str:
        payload = json.dumps(scenario_to_dict(self), sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


def make_scenario(alphabets: Sequence[int], pmf, functions, *, tree=None,
                  distortion=None, labels=None, name: str = "") -> Scenario:
    """Build and validate a scenario from in-memory data.

    ``functions`` is a list of tables (full product) or of dicts with
    ``table`` plus optional ``name`` and ``args``.
    """
    alphabets = tuple(int(a) for a in alphabets)
    if not alphabets or any(a < 1 for a in alphabets):
        raise ScenarioError("alphabets: sizes must be positive integers")
    pmf = np.asarray(pmf, dtype=np.float64)
    if pmf.size != int(np.prod(alphabets)):
        raise ScenarioError(
            f"pmf: expected {int(np.prod(alphabets))} entries, got {pmf.size}")
    pmf = pmf.reshape(alphabets)
    if np.any(~np.isfinite(pmf)) or np.any(pmf < 0):
        raise ScenarioError("pmf: entries must be finite and non-negative")
    total = float(pmf.sum())
    if abs(total - 1.0) > INTERNAL_TOL:
        raise ScenarioError(f"pmf sums to {total:.12g}")

    specs = []
    for idx, fn in enumerate(functions):
        if isinstance(fn, FunctionSpec):
            specs.append(fn)
            continue
        if not isinstance(fn, dict):
            fn = {"table": fn}
        args = tuple(int(a) for a in fn.get("args", range(len(alphabets))))
        if any(a < 0 or a >= len(alphabets) for a in args) or len(set(args)) != len(args):
            raise ScenarioError(f"functions[{idx}].args: invalid source indices {args}")
        shape = tuple(alphabets[a] for a in args)
        table = np.asarray(fn["table"])
        if table.size != int(np.prod(shape)):
            raise ScenarioError(
                f"functions[{idx}].table: expected {int(np.prod(shape))} entries, "
                f"got {table.size}")
        if not np.issubdtype(table.dtype, np.integer):
            if not np.all(np.equal(np.mod(table, 1), 0)):
                raise ScenarioError(f"functions[{idx}].table: values must be integers")
        table = table.astype(np.int64).reshape(shape)
        if np.any(table < 0):
            raise ScenarioError(f"functions[{idx}].table: values must be non-negative")
        specs.append(FunctionSpec(str(fn.get("name", f"f{idx}")), table, args))
    if not specs:
        raise ScenarioError("functions: at least one function table is required")

    if distortion is not None:
        distortion = np.asarray(distortion, dtype=np.float64)
        z = int(round(np.sqrt(distortion.size)))
        if z * z != distortion.size:
            raise ScenarioError("distortion: table must be square")
        distortion = distortion.reshape(z, z)
        if np.any(distortion < 0):
            raise ScenarioError("distortion: entries must be non-negative")
        off = ~np.eye(z, dtype=bool)
        if np.any(np.diag(distortion) != 0) or np.any(distortion[off] == 0):
            raise ScenarioError("distortion: d(z1,z2)=0 must hold iff z1=z2")
        for idx, spec in enumerate(specs):
            if spec.table.max() >= z:
                raise ScenarioError(
                    f"functions[{idx}]: value {int(spec.table.max())} outside "
                    f"distortion alphabet of size {z}")

    if tree is not None and not isinstance(tree, TreeSpec):
        tree = parse_tree(tree, len(alphabets))

    return Scenario(alphabets, pmf, tuple(specs), tree, distortion, labels, name)


def parse_tree(data: dict[str, Any], k: int) -> TreeSpec:
    try:
        receiver = str(data["receiver"])
        parent = {str(c): str(p) for c, p in data["edges"]}
        sources = {str(node): tuple(int(s) for s in (srcs if isinstance(srcs, list) else [srcs]))
                   for node, srcs in data["sources"].items()}
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioError(f"tree: malformed ({exc})") from exc
    seen = sorted(s for srcs in sources.values() for s in srcs)
    if seen != list(range(k)):
        raise ScenarioError(f"tree.sources: every source must appear exactly once, got {seen}")
    if receiver in parent:
        raise ScenarioError("tree: receiver must not have a parent")
    if receiver in sources and sources[receiver]:
        raise ScenarioError("tree: sources cannot sit at the receiver")
    return TreeSpec(receiver, parent, sources)


def scenario_from_dict(data: dict[str, Any], name: str = "") -> Scenario:
    for key in ("alphabets", "pmf", "functions"):
        if key not in data:
            raise ScenarioError(f"{key}: missing field")
    return make_scenario(data["alphabets"], data["pmf"], data["functions"],
                         tree=data.get("tree"), distortion=data.get("distortion"),
                         labels=data.get("labels"), name=name or data.get("name", ""))


def scenario_to_dict(s: Scenario) -> dict[str, Any]:
    out: dict[str, Any] = {
        "alphabets": list(s.alphabets),
        "pmf": [float(v) for v in s.pmf.ravel()],
        "functions": [
            {"name": f.name, "args": list(f.args), "table": [int(v) for v in f.table.ravel()]}
            for f in s.functions
        ],
    }
    if s.name:
        out["name"] = s.name
    if s.tree is not None:
        out["tree"] = s.tree.to_dict()
    if s.distortion is not None:
        out["distortion"] = [float(v) for v in s.distortion.ravel()]
    if s.labels is not None:
        out["labels"] = s.labels
    return out


def load_scenario(path: str | os.PathLike) -> Scenario:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: parse error: {exc}") from exc
    if not isinstance(data, dict):
        raise ScenarioError(f"{path}: top level must be an object")
    return scenario_from_dict(data, name=data.get("name", path.stem))


def save_scenario(s: Scenario, path: str | os.PathLike) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(s), indent=1) + "\n")


# ---------------------------------------------------------------------------
# Entropy utilities
# ---------------------------------------------------------------------------


def _check_normalized(p: np.ndarray, tol: float = INPUT_TOL) -> None:
    if np.any(p < 0):
        raise ValueError("probabilities must be non-negative")
    total = float(p.sum())
    if abs(total - 1.0) > tol:
        raise ValueError(f"probabilities sum to {total:.12g}, not 1")


def _plogp(p: np.ndarray) -> float:
    p = p[p > 0]
    return max(0.0, float(-(p * np.log2(p)).sum()))


def entropy(dist) -> float:
    """Shannon entropy in bits of a probability vector (0 log 0 = 0)."""
    p = np.asarray(dist, dtype=np.float64).ravel()
    _check_normalized(p)
    return _plogp(p)


def mass_entropy(masses) -> float:
    """Entropy of a list of non-negative masses, no normalization check."""
    return _plogp(np.asarray(masses, dtype=np.float64))


def conditional_entropy(joint, axis: int = 1) -> float:
    """H(rest | variable on ``axis``) for a normalized joint table."""
    p = np.asarray(joint, dtype=np.float64)
    _check_normalized(p)
    marg = p.sum(axis=tuple(a for a in range(p.ndim) if a != axis))
    return _plogp(p.ravel()) - _plogp(marg)


def joint_entropy_of(pmf: np.ndarray, axes: Sequence[int]) -> float:
    """Entropy of the marginal of ``pmf`` on ``axes``."""
    drop = tuple(a for a in range(pmf.ndim) if a not in axes)
    return _plogp(pmf.sum(axis=drop).ravel())


def shannon_conditional(pmf: np.ndarray, subset: Sequence[int]) -> float:
    """H(X_S | X_{S^c}) for a joint pmf over all sources."""
    return _plogp(pmf.ravel()) - joint_entropy_of(
        pmf, [a for a in range(pmf.ndim) if a not in subset])


def pushforward(pmf, mapping) -> np.ndarray:
    """Label distribution induced by a vertex→label map.

    ``mapping`` is a sequence of non-negative ints (one per outcome of the
    flattened pmf) or a dict.  Returns the vector indexed by label.
    """
    p = np.asarray(pmf, dtype=np.float64).ravel()
    if isinstance(mapping, dict):
        labels = np.array([mapping[i] for i in range(p.size)], dtype=np.int64)
    else:
        labels = np.asarray(mapping, dtype=np.int64).ravel()
    if labels.size != p.size:
        raise ValueError("mapping must be total on the support")
    return np.bincount(labels, weights=p, minlength=int(labels.max()) + 1 if labels.size else 0)


# ---------------------------------------------------------------------------
# Block extension
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class BlockPMF:
    """Support of the i.i.d. n-fold extension.

    ``sequences[i]`` lists the n-sequences of source i (lexicographic order),
    ``points`` holds one row per positive-probability joint block with the
    per-source sequence indices and ``probs`` their product probabilities.
    """

    n: int
    base: Scenario
    sequences: tuple[tuple[tuple[int, ...], ...], ...]
    points: np.ndarray
    probs: np.ndarray
    cells: np.ndarray = field(repr=False)

    def marginal(self, i: int) -> np.ndarray:
        return np.bincount(self.points[:, i], weights=self.probs,
                           minlength=len(self.sequences[i]))

    def function_values(self, index: int = 0) -> list[tuple[int, ...]]:
        """f applied coordinatewise to each support block."""
        table = self.base.full_table(index)
        return [tuple(int(v) for v in table[tuple(row.T)]) for row in self.cells]


def block_extend(scenario: Scenario, n: int, budget: Budget = DEFAULT_BUDGET) -> BlockPMF:
    if n < 1:
        raise ValueError("block length must be >= 1")
    full = int(np.prod(scenario.alphabets)) ** n
    check_budget("joint n-sequences", full, budget.enumeration)
    k = scenario.k
    sequences = tuple(tuple(itertools.product(range(a), repeat=n)) for a in scenario.alphabets)

    flat = scenario.pmf.ravel()
    pos = np.flatnonzero(flat > 0)
    base_cells = np.array(np.unravel_index(pos, scenario.alphabets)).T  # (m, k)
    base_probs = flat[pos]

    # product over time of positive base cells; cells[b, t, i] = symbol of source i at t
    idx = np.array(list(itertools.product(range(len(pos)), repeat=n)), dtype=np.int64)
    if idx.ndim == 1:
        idx = idx.reshape(-1, n)
    cells = base_cells[idx]  # (B, n, k)
    probs = np.prod(base_probs[idx], axis=1)
    points = np.empty((len(idx), k), dtype=np.int64)
    for i, a in enumerate(scenario.alphabets):
        w = np.array([a ** (n - 1 - t) for t in range(n)], dtype=np.int64)
        points[:, i] = cells[:, :, i] @ w
    order = np.lexsort(points.T[::-1])
    return BlockPMF(n, scenario, sequences, points[order], probs[order], cells[order])
