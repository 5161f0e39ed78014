import json

import numpy as np
import pytest

from funcomp.core import (Budget, BudgetError, ScenarioError, block_extend, conditional_entropy,
                          entropy, load_scenario, make_scenario, pushforward, save_scenario,
                          scenario_from_dict, scenario_to_dict)

from conftest import fixture


def test_mod2_fixture_shape():
    s = fixture("mod2")
    assert s.k == 2 and s.alphabets == (4, 2)
    assert np.allclose(s.pmf, 1 / 8)


def test_parity_fixture_has_two_stage_tree():
    s = fixture("parity4")
    assert s.k == 4
    assert set(s.tree.parent.values()) == {"n11", "n12", "r"}


def test_unnormalized_pmf_rejected(tmp_path):
    data = scenario_to_dict(fixture("mod2"))
    data["pmf"] = [p / 2 for p in data["pmf"]]
    path = tmp_path / "half.json"
    path.write_text(json.dumps(data))
    with pytest.raises(ScenarioError):
        load_scenario(path)


@pytest.mark.parametrize("bad", [
    dict(pmf=[-0.5, 1.5]),
    dict(functions=[[0]]),
])
def test_make_scenario_validation(bad):
    kw = dict(alphabets=[2], pmf=[0.5, 0.5], functions=[[0, 1]])
    kw.update(bad)
    with pytest.raises(ScenarioError):
        make_scenario(**kw)


def test_round_trip(tmp_path):
    s = fixture("parity4")
    save_scenario(s, tmp_path / "p.json")
    t = load_scenario(tmp_path / "p.json")
    assert t.digest() == s.digest()
    assert scenario_to_dict(scenario_from_dict(scenario_to_dict(s))) == scenario_to_dict(s)


@pytest.mark.parametrize("dist, value", [
    ([0.5, 0.5], 1.0),
    ([1.0], 0.0),
    ([0.4, 0.4, 0.2], 1.5219280948873621),
])
def test_entropy(dist, value):
    assert entropy(dist) == pytest.approx(value, abs=1e-12)


def test_entropy_rejects_unnormalized():
    with pytest.raises(ValueError):
        entropy([0.3, 0.3])


def test_conditional_entropy_cases():
    assert conditional_entropy(np.full((2, 2), 0.25)) == pytest.approx(1.0)
    assert conditional_entropy(np.diag([0.5, 0.5])) == pytest.approx(0.0)
    # X2 = X1 mod 2, X1 uniform on 4 values
    joint = np.zeros((4, 2))
    for x in range(4):
        joint[x, x % 2] = 0.25
    assert conditional_entropy(joint, axis=1) == pytest.approx(1.0)


def test_pushforward():
    p = np.full(4, 0.25)
    assert np.allclose(pushforward(p, [0, 1, 0, 1]), [0.5, 0.5])
    q = np.array([0.1, 0.2, 0.3, 0.4])
    assert np.allclose(pushforward(q, [0, 1, 2, 3]), q)


def test_block_extend():
    s = fixture("mod2")
    b1 = block_extend(s, 1)
    assert np.allclose(np.sort(b1.probs), np.sort(s.pmf[s.pmf > 0]))
    b2 = block_extend(s, 2)
    assert len(b2.probs) == 64 and np.allclose(b2.probs, 1 / 64)
    bit = make_scenario([2], [0.5, 0.5], [[0, 1]])
    b3 = block_extend(bit, 3)
    assert len(b3.probs) == 8 and np.allclose(b3.probs, 1 / 8)


def test_block_extend_budget():
    with pytest.raises(BudgetError) as err:
        block_extend(fixture("pentagon"), 3, Budget(enumeration=100))
    assert err.value.required > err.value.allowed == 100


def test_budget_from_env(monkeypatch):
    monkeypatch.setenv("FUNCOMP_BUDGET", "1234")
    assert Budget.from_env().enumeration == 1234
