import numpy as np
import pytest

from funcomp.core import make_scenario
from funcomp.netsim import build_plan, huffman_lengths, plan_from_colorings, simulate

from conftest import fixture, random_two_source


def test_huffman_lengths():
    assert huffman_lengths([0.5, 0.25, 0.25]) == [1, 2, 2]
    assert huffman_lengths([1.0]) == [0]
    lengths = huffman_lengths([0.4, 0.3, 0.2, 0.1])
    assert sum(2.0 ** -l for l in lengths) == pytest.approx(1.0)


def test_parity_plan_structure():
    plan = build_plan(fixture("parity4"))
    for v in ("x1", "x2", "x3", "x4"):
        assert plan.nodes[v].coloring == [0, 1]
    # each intermediate node forwards one bit: the XOR of its inputs
    for v in ("n11", "n12"):
        nd = plan.nodes[v]
        assert nd.num_colors == 2
        parity = {lab: (lab[0] ^ lab[1]) for lab in nd.labels}
        by_color = {}
        for lab, c in zip(nd.labels, nd.coloring):
            by_color.setdefault(c, set()).add(parity[lab])
        assert all(len(v) == 1 for v in by_color.values())
    # the receiver XORs the two intermediate bits
    out = {m: plan.outputs(m) for m in range(16)}
    for m in range(16):
        key = (out[m]["n11"], out[m]["n12"])
        assert plan.lookup[key] == plan.fvals[m]
    assert len(plan.lookup) == 4


def test_parity_simulation_sampled_is_seeded():
    plan = build_plan(fixture("parity4"))
    a = simulate(plan, "sampled", trials=500, seed=9)
    b = simulate(plan, "sampled", trials=500, seed=9)
    assert a.render() == b.render()
    assert a.errors == 0 and "seed: 9" in a.render()


def test_example1_plan():
    plan = build_plan(fixture("mod2"))
    assert plan.nodes["x1"].num_colors == 2 and plan.nodes["x2"].num_colors == 2
    assert len(plan.lookup) == 4
    assert simulate(plan).errors == 0


def test_example2_single_color_errors():
    plan = plan_from_colorings(fixture("example2"), [[0, 0], [0, 0]])
    assert not plan.decodable
    assert simulate(plan, bounds=False).errors > 0


def test_example2_repaired():
    plan = build_plan(fixture("example2"))
    assert plan.decodable and simulate(plan, bounds=False).errors == 0


def test_constant_function():
    s = make_scenario([3, 2], np.full(6, 1 / 6), [np.zeros((3, 2), int)])
    rep = simulate(build_plan(s))
    assert rep.errors == 0
    assert all(lk.rate == pytest.approx(0.0, abs=1e-12) for lk in rep.links)


def test_relay_on_proper_scenario():
    s = make_scenario([2, 2], np.full(4, 0.25), [[0, 2, 1, 3]],
                      tree={"receiver": "r", "edges": [["x1", "m"], ["x2", "m"], ["m", "r"]],
                            "sources": {"x1": [0], "x2": [1]}})
    plan = build_plan(s, relay=True)
    m = plan.nodes["m"]
    assert m.method == "relay"
    assert sorted(m.coloring) == list(range(len(m.labels)))
    assert simulate(plan, bounds=False).errors == 0


def test_fig10_completed_tree_decodes():
    s = fixture("fig10")
    plan = build_plan(s)
    rep = simulate(plan)
    assert rep.errors == 0
    # the auxiliary hop and the original link carry the same rate
    rates = plan.actual_link_rates()
    assert rates["x3"] == pytest.approx(1.0)


def test_tree_outputs_match_star():
    # completing and coding over the tree computes the same values as the
    # one-stage plan
    s = fixture("fig10")
    tree_plan = build_plan(s)
    star = plan_from_colorings(s, [tree_plan.nodes[f"x{i + 1}"].coloring for i in range(3)],
                               repair=True)
    for m in range(len(tree_plan.block_probs)):
        assert tree_plan.decode(m)[0] == star.decode(m)[0] == tree_plan.fvals[m]


def test_empirical_rate_close_to_bound_parity():
    for n in (1, 2):
        rep = simulate(build_plan(fixture("parity4"), n))
        for lk in rep.links:
            assert lk.empirical >= lk.bound - 0.05


def test_repaired_plans_decode_random():
    rng = np.random.default_rng(12)
    for _ in range(60):
        s = random_two_source(rng)
        plan = build_plan(s)
        assert all(plan.ccc_ok.values())
        assert simulate(plan, bounds=False).errors == 0


def test_unknown_strategy():
    with pytest.raises(ValueError):
        build_plan(fixture("mod2"), strategy="magic")
