"""Per-symbol minimum coloring entropy of the pentagon at n = 1, 2.

Compares the exact search, greedy MIS coloring with local refinement, and
Korner's graph entropy (the n -> infinity limit).
"""
import argparse
import time
from dataclasses import dataclass

from funcomp.chargraph import characteristic_graph, power_graph
from funcomp.cli import resolve_scenario
from funcomp.coloring import greedy_mis_coloring, min_entropy_coloring_exact, refine_coloring
from funcomp.core import Budget, block_extend, load_scenario
from funcomp.graph_entropy import graph_entropy


@dataclass
class Config:
    scenario: str = "pentagon"
    max_n: int = 2
    node_limit: int = 500_000


def run(cfg: Config):
    s = load_scenario(resolve_scenario(cfg.scenario))
    g = characteristic_graph(s, 0)
    budget = Budget(coloring_search=cfg.node_limit)
    rows = []
    for n in range(1, cfg.max_n + 1):
        gn = g if n == 1 else power_graph(g, n, block_extend(s, n).marginal(0))
        t = time.perf_counter()
        greedy = greedy_mis_coloring(gn)
        refined = refine_coloring(gn, greedy.coloring).entropy(gn.vertex_prob)
        exact = min_entropy_coloring_exact(gn, budget)
        rows.append((n, gn.size, greedy.entropy / n, refined / n, exact.entropy / n,
                     exact.optimal, exact.nodes, time.perf_counter() - t))
    return rows, graph_entropy(g).value


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--scenario", default=Config.scenario)
    ap.add_argument("--max-n", type=int, default=Config.max_n)
    ap.add_argument("--node-limit", type=int, default=Config.node_limit)
    a = ap.parse_args()
    rows, hg = run(Config(a.scenario, a.max_n, a.node_limit))
    print(f"{'n':>2} {'|V|':>5} {'greedy':>9} {'refined':>9} {'exact':>9} {'proven':>6} {'nodes':>8} {'sec':>6}")
    for n, v, gr, rf, ex, opt, nodes, sec in rows:
        print(f"{n:>2} {v:>5} {gr:9.6f} {rf:9.6f} {ex:9.6f} {str(opt):>6} {nodes:>8} {sec:6.2f}")
    print(f"graph entropy (limit): {hg:.6f}")


if __name__ == "__main__":
    main()
