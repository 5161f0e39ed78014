"""Command-line front end.

Exit status: 0 on success, 1 on validation errors (bad scenario, bad option
combination, unknown flag), 2 when a budget is exceeded.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from importlib import resources
from pathlib import Path

import numpy as np

from . import ccc as ccc_mod
from .chargraph import (characteristic_graph, d_characteristic_graph, epsilon_restrict,
                        multi_functional_graph, power_graph)
from .coloring import (chromatic_entropy, greedy_mis_coloring, min_entropy_coloring_exact,
                       min_entropy_coloring_nonzero_case, min_entropy_coloring_quantization,
                       refine_coloring)
from .core import Budget, BudgetError, ScenarioError, block_extend, load_scenario
from .distortion import distortion_scheme, rate_region_for_fhat
from .feedback import feedback_plan, simulate_feedback
from .graph_entropy import (conditional_graph_entropy, graph_entropy, rate_lower_bound_tree,
                            rate_region_one_stage)
from .netsim import STRATEGIES, build_plan, simulate

VERBS = ("graph", "color", "entropy", "ccc", "region", "tree-bound", "simulate",
         "feedback", "distortion", "multifunc")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def bundled_fixtures() -> list[Path]:
    root = resources.files("funcomp") / "fixtures"
    return sorted(Path(str(p)) for p in root.iterdir() if p.name.endswith(".json"))


def resolve_scenario(arg: str) -> Path:
    p = Path(arg)
    if p.exists():
        return p
    name = p.name if p.name.endswith(".json") else p.name + ".json"
    for fx in bundled_fixtures():
        if fx.name == name:
            return fx
    raise ScenarioError(f"{arg}: no such file or bundled fixture")


def _source(args, scenario) -> int:
    i = args.source - 1
    if not 0 <= i < scenario.k:
        raise UsageError(f"--source must be between 1 and {scenario.k}")
    return i


def _graph(scenario, i, args, budget):
    g = characteristic_graph(scenario, i)
    if getattr(args, "n", 1) > 1:
        block = block_extend(scenario, args.n, budget)
        g = power_graph(g, args.n, block.marginal(i), budget)
    return g


# ---------------------------------------------------------------------------
# verbs
# ---------------------------------------------------------------------------


def cmd_graph(args, scenario, budget):
    i = _source(args, scenario)
    if args.D is not None:
        if args.n > 1:
            raise UsageError("--D applies to base graphs only")
        g = d_characteristic_graph(scenario, i, args.D)
    else:
        g = _graph(scenario, i, args, budget)
    if args.eps:
        g = epsilon_restrict(g, args.eps)
    data = {"source": args.source, "n": args.n, "vertices": len(g.vertices),
            "edges": sorted(list(e) for e in g.edges), "removed_mass": g.removed_mass,
            "vertex_prob": [float(p) for p in g.vertex_prob]}
    text = (f"source: {args.source}\nn: {args.n}\nvertices: {g.size}\nedges: {len(g.edges)}\n"
            f"removed mass: {g.removed_mass:.6f}\n" + g.to_adjacency_text())
    return text, data


def cmd_color(args, scenario, budget):
    i = _source(args, scenario)
    g = _graph(scenario, i, args, budget)
    if args.eps:
        h, col, g2 = chromatic_entropy(g, args.eps, budget)
        rep_text = f"method: exact\nentropy: {h:.6f}\ncolors: {col.num_colors}"
        data = {"method": "exact", "entropy": h, "assignment": list(col.assignment),
                "removed_mass": g2.removed_mass}
        return rep_text + f"\nremoved mass: {g2.removed_mass:.6f}", data
    if args.method == "exact":
        rep = min_entropy_coloring_exact(g, budget)
    elif args.method == "nonzero":
        rep = min_entropy_coloring_nonzero_case(g)
    elif args.method == "quantization":
        if args.n != 1:
            raise UsageError("the quantization case applies at n=1")
        rep = min_entropy_coloring_quantization(scenario, i)
    elif args.method == "refined":
        base = greedy_mis_coloring(g, budget)
        col = refine_coloring(g, base.coloring)
        rep = replace(base, coloring=col, entropy=col.entropy(g.vertex_prob), method="greedy+refine")
    else:
        rep = greedy_mis_coloring(g, budget)
    per = rep.entropy / args.n if rep.coloring is not None else None
    text = rep.render()
    if rep.coloring is not None:
        text += f"\nper-symbol entropy: {per:.6f}\ncoloring: " + " ".join(
            f"{v}:{c}" for v, c in enumerate(rep.coloring.assignment))
    data = {"method": rep.method, "applicable": rep.applicable, "optimal": rep.optimal,
            "entropy": None if rep.coloring is None else rep.entropy,
            "per_symbol_entropy": per, "nodes": rep.nodes,
            "assignment": None if rep.coloring is None else list(rep.coloring.assignment)}
    return text, data


def cmd_entropy(args, scenario, budget):
    i = _source(args, scenario)
    g = characteristic_graph(scenario, i)
    if args.conditional:
        joint = np.moveaxis(scenario.pmf, i, 0).reshape(scenario.alphabets[i], -1)
        res = conditional_graph_entropy(g, joint, tol=args.tol, budget=budget)
        kind = "conditional graph entropy"
    else:
        res = graph_entropy(g, tol=args.tol, budget=budget)
        kind = "graph entropy"
    text = f"source: {args.source}\n{kind}: {res.value:.6f} bits\niterations: {res.iterations}"
    return text, {"source": args.source, "kind": kind, "bits": res.value,
                  "iterations": res.iterations}


def _named_coloring(name, g):
    if name == "single":
        return [0] * g.size
    if name == "trivial":
        return list(range(g.size))
    if name == "min":
        return list(min_entropy_coloring_exact(g).coloring.assignment)
    raise UsageError(f"unknown coloring {name!r}")


def cmd_ccc(args, scenario, budget):
    support = ccc_mod.JointSupport.from_scenario(scenario, args.n, budget=budget)
    names = args.coloring.split(",")
    if len(names) == 1:
        names = names * scenario.k
    if len(names) != scenario.k:
        raise UsageError(f"--coloring needs 1 or {scenario.k} comma-separated names")
    cols = []
    for i, name in enumerate(names):
        g = support.graph(i)
        col = _named_coloring(name, g)
        bad = next(((a, b) for a, b in sorted(g.edges) if col[a] == col[b]), None)
        if bad is not None:
            raise UsageError(f"coloring {name!r} of source {i + 1} is invalid at edge {bad}")
        cols.append(col)
    fam = ccc_mod.joint_coloring_family(cols, support)
    res = ccc_mod.satisfies_ccc(fam)
    lines = [f"classes: {len(fam.classes)}", f"C.C.C.: {'satisfied' if res.ok else 'violated'}"]
    data = {"classes": len(fam.classes), "ccc": res.ok, "witness": None}
    if res.witness:
        lines.append("witness: " + ccc_mod.describe_witness(fam, res.witness))
        w = res.witness
        data["witness"] = {"colors": list(w.colors),
                           "points": [support.points[w.point_a].tolist(),
                                      support.points[w.point_b].tolist()],
                           "f": [w.f_a, w.f_b]}
    else:
        table = ccc_mod.build_lookup(fam)
        lines.append(f"lookup rows: {len(table)}")
        for key in sorted(table):
            lines.append(f"  {key} -> {table[key]}")
    if scenario.k == 2:
        z = ccc_mod.check_zigzag(scenario)
        lines.append(f"zigzag: {'holds' if z else 'fails'}")
        data["zigzag"] = z
    return "\n".join(lines), data


def _region_data(region):
    return [{"stage": q.stage, "links": list(q.links), "bound": q.bound, "label": q.label}
            for q in region.inequalities]


def cmd_region(args, scenario, budget):
    region = rate_region_one_stage(scenario, args.n, budget)
    return region.render(), {"inequalities": _region_data(region)}


def cmd_tree_bound(args, scenario, budget):
    region = rate_lower_bound_tree(scenario, args.n, budget)
    return region.render(), {"inequalities": _region_data(region)}


def cmd_simulate(args, scenario, budget):
    plan = build_plan(scenario, args.n, args.strategy, relay=args.relay,
                      repair=not args.no_repair, budget=budget)
    rep = simulate(plan, args.mode, args.trials, args.seed, budget=budget)
    return rep.render(), rep.to_dict()


def cmd_feedback(args, scenario, budget):
    plan = feedback_plan(scenario, args.n, budget)
    rep = simulate_feedback(plan, args.mode, args.trials, args.seed)
    return plan.render() + "\n" + rep.render(), {
        "p_a": plan.p_a, "rate_with": plan.rate_with, "rate_without": plan.rate_without,
        "gain": plan.gain, **rep.to_dict()}


def cmd_distortion(args, scenario, budget):
    if scenario.distortion is None:
        raise UsageError("distortion: scenario has no distortion table")
    if args.fhat:
        fhat = [int(x) for x in args.fhat.split(",")]
        res = rate_region_for_fhat(scenario, fhat, args.D, budget=budget)
        if hasattr(res, "expected_distortion"):
            return res.render(), {"rejected": True, "expected_distortion": res.expected_distortion}
        return res.render(), {"rejected": False, "inequalities": _region_data(res)}
    res = distortion_scheme(scenario, args.D, budget=budget)
    return res.render(), {"D": args.D, "edges": [sorted(list(e) for e in g.edges) for g in res.graphs],
                          **res.report.to_dict()}


def cmd_multifunc(args, scenario, budget):
    i = _source(args, scenario)
    funcs = None if not args.functions else [int(x) - 1 for x in args.functions.split(",")]
    g = multi_functional_graph(scenario, funcs, i)
    rep = min_entropy_coloring_exact(g, budget)
    text = (f"source: {args.source}\nedges: {sorted(g.edges)}\n"
            f"min-entropy coloring: {rep.entropy:.6f}\n" + g.to_adjacency_text())
    return text, {"source": args.source, "edges": sorted(list(e) for e in g.edges),
                  "coloring_entropy": rep.entropy}


HANDLERS = {"graph": cmd_graph, "color": cmd_color, "entropy": cmd_entropy, "ccc": cmd_ccc,
            "region": cmd_region, "tree-bound": cmd_tree_bound, "simulate": cmd_simulate,
            "feedback": cmd_feedback, "distortion": cmd_distortion, "multifunc": cmd_multifunc}


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="funcomp", description="Functional compression toolkit.")
    parser.add_argument("--list-fixtures", action="store_true",
                        help="list bundled scenario fixtures and exit")
    sub = parser.add_subparsers(dest="verb", parser_class=_Parser)

    def verb(name, help_text):
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("scenario", help="scenario file or bundled fixture name")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.add_argument("--output", "-o", help="also write the report to this file")
        p.add_argument("--threads", type=int, default=1,
                       help="accepted for scripting; all work runs in one thread, "
                            "so results never depend on it")
        p.add_argument("--budget", type=float, default=None,
                       help="joint n-sequence enumeration budget (default 2e6 or FUNCOMP_BUDGET)")
        p.add_argument("--exact-cap", type=int, default=26,
                       help="vertex cap for exact coloring search")
        p.add_argument("--search-nodes", type=int, default=500_000,
                       help="node / tuple budget for coloring searches")
        return p

    p = verb("graph", "characteristic graph (or power / D-graph) of one source")
    p.add_argument("--source", type=int, default=1)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--D", type=float, default=None)

    p = verb("color", "minimum-entropy coloring of a characteristic graph")
    p.add_argument("--source", type=int, default=1)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--method", choices=["exact", "nonzero", "quantization", "greedy", "refined"],
                   default="exact")

    p = verb("entropy", "graph entropy of one source's characteristic graph")
    p.add_argument("--source", type=int, default=1)
    p.add_argument("--conditional", action="store_true",
                   help="condition on the other sources")
    p.add_argument("--tol", type=float, default=1e-9)

    p = verb("ccc", "check the coloring connectivity condition")
    p.add_argument("--coloring", default="min",
                   help="single | trivial | min, or one per source separated by commas")
    p.add_argument("--n", type=int, default=1)

    p = verb("region", "one-stage rate region at block length n")
    p.add_argument("--n", type=int, default=1)

    p = verb("tree-bound", "per-stage rate lower bounds of the completed tree")
    p.add_argument("--n", type=int, default=1)

    p = verb("simulate", "build a coding plan and simulate it")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--strategy", choices=STRATEGIES, default="exact")
    p.add_argument("--mode", choices=["exhaustive", "sampled"], default="exhaustive")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--relay", action="store_true", help="intermediate nodes forward inputs")
    p.add_argument("--no-repair", action="store_true", help="skip C.C.C. repair")

    p = verb("feedback", "two-source feedback scheme")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--mode", choices=["exhaustive", "sampled"], default="exhaustive")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)

    p = verb("distortion", "D/2 coloring scheme, or a rate region for a given fhat")
    p.add_argument("--D", type=float, required=True)
    p.add_argument("--fhat", help="comma-separated fhat table (row-major)")

    p = verb("multifunc", "multi-functional characteristic graph")
    p.add_argument("--source", type=int, default=1)
    p.add_argument("--functions", help="comma-separated 1-based function indices")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.list_fixtures:
        for fx in bundled_fixtures():
            print(fx.stem)
        return 0
    if not args.verb:
        parser.print_usage(sys.stderr)
        return 1
    env = Budget.from_env()
    budget = Budget(enumeration=int(args.budget) if args.budget else env.enumeration,
                    exact_cap=args.exact_cap, coloring_search=args.search_nodes)
    try:
        scenario = load_scenario(resolve_scenario(args.scenario))
        text, data = HANDLERS[args.verb](args, scenario, budget)
    except BudgetError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 2
    except (ScenarioError, UsageError, ValueError, ccc_mod.InvalidColoringError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    out = json.dumps(data, indent=1, sort_keys=True, default=_jsonable) if args.json else text
    print(out)
    if args.output:
        Path(args.output).write_text(out + "\n")
    return 0


def _jsonable(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.ndarray, tuple, frozenset, set)):
        return list(x)
    return str(x)


if __name__ == "__main__":
    sys.exit(main())
