"""Lossy computation: the D/2 coloring scheme and per-fhat rate regions."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .chargraph import Graph, d_characteristic_graph
from .coloring import Coloring, color_graph
from .core import DEFAULT_BUDGET, Budget, Scenario, ScenarioError
from .graph_entropy import RateRegion, graph_entropy, rate_region_one_stage
from .netsim import LinkReport, SimReport, huffman_lengths


def check_metric(d: np.ndarray) -> None:
    """Raise unless d is symmetric with a zero diagonal and satisfies the
    triangle inequality on every triple."""
    if not np.allclose(d, d.T):
        raise ScenarioError("distortion is not symmetric")
    z = d.shape[0]
    for a, b, c in itertools.product(range(z), repeat=3):
        if d[a, c] > d[a, b] + d[b, c] + 1e-12:
            raise ScenarioError(f"distortion violates the triangle inequality at {(a, b, c)}")


def check_independent(scenario: Scenario, tol: float = 1e-12) -> None:
    p = scenario.pmf
    outer = np.multiply.outer(p.sum(axis=1), p.sum(axis=0))
    if not np.allclose(p, outer, atol=tol, rtol=0):
        raise ScenarioError("distortion scheme requires independent sources")


@dataclass(frozen=True, eq=False)
class DistortionResult:
    D: float
    graphs: tuple[Graph, Graph]
    colorings: tuple[Coloring, Coloring]
    decoder: dict[tuple[int, int], int]    # color pair -> output value
    report: SimReport
    graph_entropies: tuple[float, float]

    def render(self) -> str:
        lines = [f"D: {self.D:g}"]
        for i, g in enumerate(self.graphs):
            lines.append(f"G_X{i + 1}(D/2) edges: {sorted(g.edges)}")
        return "\n".join(lines) + "\n" + self.report.render()


def distortion_scheme(scenario: Scenario, D: float, strategy: str = "exact",
                      budget: Budget = DEFAULT_BUDGET) -> DistortionResult:
    """Color the D/2-characteristic graphs and decode each color pair at its
    lowest-index support representative; a metric keeps the error <= D."""
    if scenario.k != 2:
        raise ScenarioError("distortion scheme is defined for two sources")
    if scenario.distortion is None:
        raise ScenarioError("distortion: table required")
    check_metric(scenario.distortion)
    check_independent(scenario)
    d = scenario.distortion
    F = np.asarray(scenario.full_table(0))
    graphs = tuple(d_characteristic_graph(scenario, i, D / 2) for i in range(2))
    cols = tuple(color_graph(g, strategy, budget).coloring for g in graphs)

    support = [tuple(int(x) for x in pt) for pt in np.argwhere(scenario.pmf > 0)]
    decoder: dict[tuple[int, int], int] = {}
    for a, b in support:
        decoder.setdefault((cols[0][a], cols[1][b]), int(F[a, b]))

    worst, mean, errors = 0.0, 0.0, 0
    for a, b in support:
        out = decoder[(cols[0][a], cols[1][b])]
        dist = float(d[F[a, b], out])
        worst = max(worst, dist)
        mean += scenario.pmf[a, b] * dist
        errors += out != F[a, b]

    links = []
    ents = []
    for i, (g, c) in enumerate(zip(graphs, cols)):
        dist = c.distribution(g.vertex_prob)
        lengths = np.array(huffman_lengths(dist))
        emp = float((dist * lengths).sum())
        h = graph_entropy(g, budget=budget).value
        ents.append(h)
        links.append(LinkReport(f"R_{{1,{i + 1}}}", f"x{i + 1}", f"x{i + 1}",
                                c.entropy(g.vertex_prob), emp, h, "graph entropy of G(D/2)"))
    report = SimReport(scenario.name or scenario.digest(), 1, "exhaustive", None,
                       len(support), errors, 0.0, tuple(links), worst, float(mean),
                       scenario_hash=scenario.digest())
    return DistortionResult(D, graphs, cols, decoder, report, tuple(ents))


@dataclass(frozen=True)
class Rejection:
    expected_distortion: float
    D: float

    def render(self) -> str:
        return (f"rejected: E[d(f, fhat)] = {self.expected_distortion:.6f} "
                f"exceeds D = {self.D:g}")


def expected_distortion(scenario: Scenario, fhat) -> float:
    if scenario.distortion is None:
        raise ScenarioError("distortion: table required")
    F = np.asarray(scenario.full_table(0))
    G = np.asarray(fhat, dtype=np.int64)
    if G.size != F.size:
        raise ScenarioError("fhat must be defined on the same domain as f")
    G = G.reshape(F.shape)
    if G.max() >= scenario.distortion.shape[0]:
        raise ScenarioError("fhat takes values outside the distortion alphabet")
    return float((scenario.pmf * scenario.distortion[F, G]).sum())


def rate_region_for_fhat(scenario: Scenario, fhat, D: float, n: int = 1,
                         budget: Budget = DEFAULT_BUDGET) -> RateRegion | Rejection:
    """Rate region for computing fhat losslessly, if fhat meets the budget."""
    e = expected_distortion(scenario, fhat)
    if e > D + 1e-12:
        return Rejection(e, D)
    return rate_region_one_stage(scenario.with_function(fhat), n, budget)
