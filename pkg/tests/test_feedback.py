import numpy as np
import pytest

from funcomp.feedback import empirical_rate_without, feedback_plan, simulate_feedback

from conftest import fixture, random_two_source


def test_fixture_plan():
    plan = feedback_plan(fixture("feedback"))
    assert plan.p_a == pytest.approx(0.25)
    assert plan.gain > 0
    assert plan.rate_with == pytest.approx(plan.rate_without - plan.gain)
    rep = simulate_feedback(plan)
    assert rep.errors == 0
    assert rep.feedback["mode c' usage"] == pytest.approx(plan.p_a)
    assert abs(rep.feedback["empirical rate with feedback"] - plan.rate_with) <= 0.15


def test_example2_covers_support():
    plan = feedback_plan(fixture("example2"))
    assert plan.p_a == pytest.approx(1.0)
    assert plan.gain == 0
    assert plan.h_min < plan.h_prime
    rep = simulate_feedback(plan)
    assert rep.errors == 0
    assert rep.feedback["empirical rate with feedback"] == pytest.approx(empirical_rate_without(plan))


def test_ccc_minimum_means_no_gain():
    plan = feedback_plan(fixture("mod2"))
    assert plan.c_min == plan.c_prime and plan.gain == 0
    assert plan.p_a == 0


def test_identity_no_gain():
    assert feedback_plan(fixture("identity")).gain == 0


def test_gain_nonnegative_random():
    rng = np.random.default_rng(2)
    for _ in range(40):
        plan = feedback_plan(random_two_source(rng, max_alpha=3))
        assert plan.gain >= 0
        assert simulate_feedback(plan).errors == 0


def test_sampled_mode_seeded():
    plan = feedback_plan(fixture("feedback"))
    a = simulate_feedback(plan, "sampled", trials=400, seed=3)
    b = simulate_feedback(plan, "sampled", trials=400, seed=3)
    assert a.to_dict() == b.to_dict() and a.errors == 0
