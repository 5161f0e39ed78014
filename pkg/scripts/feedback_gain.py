"""Feedback gain: analytic vs simulated, on a scenario file or random ones."""
import argparse
from dataclasses import dataclass

import numpy as np

from funcomp.cli import resolve_scenario
from funcomp.core import load_scenario, make_scenario
from funcomp.feedback import empirical_rate_without, feedback_plan, simulate_feedback


@dataclass
class Config:
    scenario: str | None = "feedback"
    random: int = 0
    seed: int = 0
    alphabet: int = 3


def random_scenario(rng, a):
    pmf = rng.random((a, a)) * (rng.random((a, a)) < 0.75)
    if pmf.sum() == 0:
        pmf[0, 0] = 1.0
    return make_scenario([a, a], pmf / pmf.sum(), [rng.integers(0, 3, size=(a, a))])


def row(s):
    plan = feedback_plan(s)
    rep = simulate_feedback(plan)
    emp = empirical_rate_without(plan) - rep.feedback["empirical rate with feedback"]
    return plan.p_a, plan.h_min, plan.h_prime, plan.gain, emp, rep.errors


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--scenario", default=Config.scenario)
    ap.add_argument("--random", type=int, default=Config.random,
                    help="also evaluate this many random 3x3 scenarios")
    ap.add_argument("--seed", type=int, default=Config.seed)
    cfg = Config(**vars(ap.parse_args()))
    print(f"{'case':>10} {'P_a':>7} {'H(cmin)':>8} {'H(cp)':>8} {'gain':>8} {'sim':>8} {'err':>4}")
    if cfg.scenario:
        p_a, hm, hp, gain, emp, err = row(load_scenario(resolve_scenario(cfg.scenario)))
        print(f"{cfg.scenario:>10} {p_a:7.4f} {hm:8.4f} {hp:8.4f} {gain:8.4f} {emp:8.4f} {err:>4}")
    rng = np.random.default_rng(cfg.seed)
    gaps = []
    for t in range(cfg.random):
        p_a, hm, hp, gain, emp, err = row(random_scenario(rng, cfg.alphabet))
        gaps.append(abs(gain - emp))
        if gain > 0:
            print(f"{'rand' + str(t):>10} {p_a:7.4f} {hm:8.4f} {hp:8.4f} {gain:8.4f} {emp:8.4f} {err:>4}")
    if gaps:
        print(f"max |analytic - simulated| over {len(gaps)} random scenarios: {max(gaps):.4f}")


if __name__ == "__main__":
    main()
