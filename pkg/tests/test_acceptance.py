"""Acceptance criteria, one test per criterion.

The terminal summary (see conftest) prints one PASS/FAIL line per test.
"""
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from funcomp.ccc import (JointSupport, NotCCCError, build_lookup, check_zigzag,
                         joint_coloring_family, satisfies_ccc)
from funcomp.chargraph import characteristic_graph, d_characteristic_graph, power_graph
from funcomp.cli import bundled_fixtures
from funcomp.coloring import (greedy_mis_coloring, min_entropy_coloring_exact,
                              min_entropy_coloring_nonzero_case, refine_coloring)
from funcomp.core import block_extend, load_scenario, make_scenario
from funcomp.distortion import distortion_scheme
from funcomp.feedback import empirical_rate_without, feedback_plan, simulate_feedback
from funcomp.graph_entropy import (chain_rule_gap, conditional_graph_entropy, graph_entropy,
                                   min_joint_coloring, rate_region_one_stage)
from funcomp.netsim import build_plan, plan_from_colorings, simulate

from conftest import fixture, random_two_source, random_valid_coloring
from oracles import brute_min_entropy_coloring, char_edges, korner_grid, shannon_h


def _pentagon_entropy():
    # colour classes {a,c},{b,d},{e} of the uniform 5-cycle
    return -(2 * 0.4 * math.log2(0.4) + 0.2 * math.log2(0.2))


def test_ac01_c4_graph_entropy():
    t = time.perf_counter()
    g = characteristic_graph(fixture("mod2"), 0)
    value = graph_entropy(g).value
    assert time.perf_counter() - t < 1.0
    # log 4 - log 2
    assert abs(value - 1.0) <= 1e-6
    out = subprocess.run([sys.executable, "-m", "funcomp", "entropy", "mod2.json", "--source", "1"],
                         capture_output=True, text=True, check=True).stdout
    assert "graph entropy: 1.000000 bits" in out


def test_ac02_pentagon_colorings():
    s = fixture("pentagon")
    g = characteristic_graph(s, 0)
    h1 = min_entropy_coloring_exact(g).entropy
    assert abs(h1 - _pentagon_entropy()) <= 1e-6
    assert abs(h1 - brute_min_entropy_coloring(g.size, g.edges, g.vertex_prob)) <= 1e-9
    t = time.perf_counter()
    g2 = power_graph(g, 2, block_extend(s, 2).marginal(0))
    assert g2.size == 25
    rep = min_entropy_coloring_exact(g2)
    if rep.coloring is None:
        greedy = greedy_mis_coloring(g2)
        col = refine_coloring(g2, greedy.coloring)
        per_symbol = col.entropy(g2.vertex_prob) / 2
    else:
        per_symbol = rep.entropy / 2
    assert time.perf_counter() - t < 60
    assert per_symbol <= 1.49
    assert per_symbol < h1


def test_ac03_parity_tree():
    t = time.perf_counter()
    plan = build_plan(fixture("parity4"), 1, "exact")
    rep = simulate(plan, "exhaustive")
    assert time.perf_counter() - t < 1.0
    assert rep.trials == 16 and rep.errors == 0
    assert "errors: 0/16" in rep.render()
    for lk in rep.links:
        assert abs(lk.rate - 1.0) <= 1e-9
        assert abs(lk.bound - 1.0) <= 1e-9
    assert all(abs(r - 1.0) <= 1e-9 for r in plan.actual_link_rates().values())


def test_ac04_ccc_three_way_equivalence():
    t = time.perf_counter()
    rng = np.random.default_rng(20240417)
    outcomes = {True: 0, False: 0}
    for _ in range(300):
        s = random_two_source(rng, max_alpha=4, n_values=int(rng.integers(2, 4)))
        graphs = [characteristic_graph(s, i) for i in range(2)]
        cols = [random_valid_coloring(g, rng) for g in graphs]
        support = JointSupport.from_scenario(s)
        family = joint_coloring_family(cols, support)
        ccc_ok = bool(satisfies_ccc(family))
        try:
            build_lookup(family)
            lookup_ok = True
        except NotCCCError:
            lookup_ok = False
        errors = simulate(plan_from_colorings(s, cols), "exhaustive", bounds=False).errors
        assert ccc_ok == lookup_ok == (errors == 0), (s.pmf, s.full_table(0), cols)
        outcomes[ccc_ok] += 1
    assert outcomes[True] > 20 and outcomes[False] > 20
    # diagonal support with one colour per source
    ex2 = fixture("example2")
    fam = joint_coloring_family([[0, 0], [0, 0]], JointSupport.from_scenario(ex2))
    res = satisfies_ccc(fam)
    assert not res.ok
    pts = {tuple(fam.support.points[m]) for m in (res.witness.point_a, res.witness.point_b)}
    assert pts == {(0, 0), (1, 1)}
    assert time.perf_counter() - t < 120


def test_ac05_nonzero_case_optimality():
    t = time.perf_counter()
    rng = np.random.default_rng(5)
    for _ in range(120):
        s = random_two_source(rng, max_alpha=5, n_values=int(rng.integers(2, 5)), positive=True)
        for i in range(2):
            g = characteristic_graph(s, i)
            A = g.adjacency_matrix.astype(bool)
            # "not adjacent" must be an equivalence relation
            same = ~A
            assert (same == same.T).all()
            assert ((same.astype(int) @ same.astype(int) > 0) <= same).all()
            fast = min_entropy_coloring_nonzero_case(g)
            assert fast.applicable
            exact = min_entropy_coloring_exact(g)
            assert abs(fast.entropy - exact.entropy) <= 1e-9
            assert abs(exact.entropy - brute_min_entropy_coloring(g.size, g.edges, g.vertex_prob)) <= 1e-9
    assert time.perf_counter() - t < 60


def _small_suite_graphs():
    seen = []
    for path in bundled_fixtures():
        s = load_scenario(path)
        for i in range(s.k):
            g = characteristic_graph(s, i)
            if g.size <= 5:
                seen.append((f"{path.stem}[{i + 1}]", g))
        if s.distortion is not None and s.k == 2:
            for D in (0.5, 1.0, 2.0):
                for i in range(2):
                    g = d_characteristic_graph(s, i, D)
                    if g.size <= 5:
                        seen.append((f"{path.stem}[{i + 1}] D={D}", g))
    unique = {}
    for name, g in seen:
        key = (g.size, g.edges, tuple(np.round(g.vertex_prob, 12)))
        unique.setdefault(key, (name, g))
    return list(unique.values())


def test_ac06_korner_grid_oracle():
    graphs = _small_suite_graphs()
    assert len(graphs) >= 10
    for name, g in graphs:
        res = graph_entropy(g)
        grid = korner_grid(g.size, g.edges, g.vertex_prob, step=0.01)
        assert abs(res.value - grid) <= 1e-3, name
        assert res.value <= grid + 1e-9, name
        trace = np.asarray(res.trace)
        assert (np.diff(trace) <= 1e-12).all(), name


def test_ac07_identity_specializations():
    s = fixture("identity")
    p = s.pmf
    h12 = shannon_h(p)
    h1g2 = h12 - shannon_h(p.sum(axis=0))
    h2g1 = h12 - shannon_h(p.sum(axis=1))
    region = rate_region_one_stage(s)
    assert abs(region.bound([1]) - h1g2) <= 1e-9
    assert abs(region.bound([2]) - h2g1) <= 1e-9
    assert abs(region.bound([1, 2]) - h12) <= 1e-9
    g = characteristic_graph(s, 0)
    assert len(g.edges) == g.size * (g.size - 1) // 2
    cond = conditional_graph_entropy(g, p).value
    assert abs(cond - h1g2) <= 1e-6
    # random identity scenarios, including sparse supports
    rng = np.random.default_rng(11)
    for _ in range(40):
        r = random_two_source(rng, max_alpha=3)
        a1, a2 = r.alphabets
        ident = make_scenario(r.alphabets, r.pmf, [np.arange(a1 * a2).reshape(a1, a2)])
        reg = rate_region_one_stage(ident)
        q = ident.pmf
        joint = shannon_h(q)
        assert abs(reg.bound([1]) - (joint - shannon_h(q.sum(axis=0)))) <= 1e-9
        assert abs(reg.bound([2]) - (joint - shannon_h(q.sum(axis=1)))) <= 1e-9
        assert abs(reg.bound([1, 2]) - joint) <= 1e-9


def test_ac08_zigzag_vs_ccc():
    rng = np.random.default_rng(8)
    zig = 0
    for _ in range(400):
        s = random_two_source(rng, max_alpha=4, density=0.75)
        if not check_zigzag(s):
            continue
        zig += 1
        support = JointSupport.from_scenario(s)
        for _ in range(3):
            cols = [random_valid_coloring(characteristic_graph(s, i), rng) for i in range(2)]
            assert satisfies_ccc(joint_coloring_family(cols, support)).ok
    assert zig >= 30
    nz = fixture("nozigzag")
    assert not check_zigzag(nz)
    best = min_joint_coloring(JointSupport.from_scenario(nz), (0, 1), conditional=False)
    fam = joint_coloring_family(best.colorings, JointSupport.from_scenario(nz))
    assert satisfies_ccc(fam).ok
    trivial = joint_coloring_family([[0, 1, 2], [0, 1, 2]], JointSupport.from_scenario(nz))
    assert satisfies_ccc(trivial).ok


def test_ac09_feedback_gain():
    s = fixture("feedback")
    plan = feedback_plan(s)
    assert 0 < plan.p_a < 1
    # entropies of the colour-pair distributions, recomputed here
    sup = plan.support

    def pair_entropy(cols):
        keys = [(cols[0][a], cols[1][b]) for a, b in sup.points]
        mass = {}
        for k, w in zip(keys, sup.probs):
            mass[k] = mass.get(k, 0.0) + w
        return shannon_h(list(mass.values()))

    h_min, h_prime = pair_entropy(plan.c_min), pair_entropy(plan.c_prime)
    assert abs(h_min - plan.h_min) <= 1e-12 and abs(h_prime - plan.h_prime) <= 1e-12
    assert plan.gain == pytest.approx((1 - plan.p_a) * (h_prime - h_min) / plan.n, abs=1e-12)
    assert plan.gain > 0
    rep = simulate_feedback(plan, "exhaustive")
    assert rep.errors == 0
    measured = empirical_rate_without(plan) - rep.feedback["empirical rate with feedback"]
    assert abs(measured - plan.gain) <= 0.05
    assert feedback_plan(fixture("identity")).gain == 0


def test_ac10_distortion_guarantee():
    s = fixture("distortion")
    prev = None
    for D in (0, 1, 2):
        res = distortion_scheme(s, D)
        assert res.report.max_distortion <= D + 1e-12
        edges = [set(g.edges) for g in res.graphs]
        if prev is not None:
            assert all(e <= p for e, p in zip(edges, prev))
        prev = edges
        if D == 0:
            assert res.report.errors == 0
            for i in range(2):
                assert set(res.graphs[i].edges) == char_edges(s.pmf, s.full_table(0), i)
            lossless = build_plan(s, 1, "exact")
            for i, name in enumerate(lossless.tree.stage(1)):
                assert list(res.colorings[i].assignment) == list(lossless.nodes[name].coloring)


def test_ac11_chain_rule_failure():
    # f = x1 on the diagonal support: each marginal alone needs nothing
    # beyond the other, yet the pair must carry one bit
    joint, chained = chain_rule_gap(fixture("example2"))
    assert abs(joint - chained) > 0.01
    assert joint == pytest.approx(1.0) and chained == pytest.approx(0.0)
