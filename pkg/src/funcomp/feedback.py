"""Feedback between two sources and the receiver.

Each block, both sources report whether their sequence lies in the
projection of the bad set A (the classes of the unconstrained optimum that
break C.C.C.).  The receiver echoes both bits; when both are in, the
C.C.C.-constrained coloring pair c' is used, otherwise the unconstrained
optimum c_min, which decodes correctly outside A_X1 x A_X2.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ccc import JointSupport, joint_coloring_family, satisfies_ccc
from .core import DEFAULT_BUDGET, Budget, Scenario
from .graph_entropy import min_joint_coloring
from .netsim import SimReport, _sample, huffman_lengths

SIGNAL_BITS = 4


@dataclass(frozen=True, eq=False)
class FeedbackPlan:
    support: JointSupport
    c_min: tuple[tuple[int, ...], tuple[int, ...]]
    c_prime: tuple[tuple[int, ...], tuple[int, ...]]
    h_min: float              # H(c_min) in bits per block
    h_prime: float            # H(c') in bits per block
    A: tuple[int, ...]        # support point indices in violating classes
    A_x1: frozenset[int]
    A_x2: frozenset[int]
    p_a: float
    n: int
    scenario: Scenario | None = None

    @property
    def rate_without(self) -> float:
        return self.h_prime / self.n

    @property
    def rate_with(self) -> float:
        return (self.p_a * self.h_prime + (1 - self.p_a) * self.h_min) / self.n

    @property
    def gain(self) -> float:
        return (1 - self.p_a) * (self.h_prime - self.h_min) / self.n

    def in_both(self, m: int) -> bool:
        a, b = self.support.points[m]
        return int(a) in self.A_x1 and int(b) in self.A_x2

    def render(self) -> str:
        return "\n".join([
            f"n: {self.n}",
            f"H(c_min): {self.h_min / self.n:.6f}",
            f"H(c'): {self.h_prime / self.n:.6f}",
            f"violating points: {len(self.A)}",
            f"P_a: {self.p_a:.6f}",
            f"rate without feedback: {self.rate_without:.6f}",
            f"rate with feedback: {self.rate_with:.6f}",
            f"gain: {self.gain:.6f}",
        ])


def feedback_plan(scenario: Scenario, n: int = 1, budget: Budget = DEFAULT_BUDGET) -> FeedbackPlan:
    if scenario.k != 2:
        raise ValueError("the feedback scheme is defined for two sources")
    support = JointSupport.from_scenario(scenario, n, budget=budget)
    best_any = min_joint_coloring(support, (0, 1), conditional=False, require_ccc=False,
                                  budget=budget)
    best_ccc = min_joint_coloring(support, (0, 1), conditional=False, budget=budget)
    h_prime = best_ccc.value * n
    if best_ccc.value - best_any.value <= 1e-12:
        # a minimizer already satisfies C.C.C.; use it for both modes
        c_min, h_min = best_ccc.colorings, h_prime
    else:
        c_min, h_min = best_any.colorings, best_any.value * n
    fam = joint_coloring_family(c_min, support)
    res = satisfies_ccc(fam)
    A = sorted(m for ci in res.violating for m in fam.classes[ci].members)
    ax1 = frozenset(int(support.points[m, 0]) for m in A)
    ax2 = frozenset(int(support.points[m, 1]) for m in A)
    both = np.array([int(a) in ax1 and int(b) in ax2 for a, b in support.points], dtype=bool)
    p_a = float(support.probs[both].sum())
    return FeedbackPlan(support, tuple(c_min), tuple(best_ccc.colorings), h_min, h_prime,
                        tuple(A), ax1, ax2, p_a, n, scenario)


def _pair_codes(cols, support):
    c1 = np.asarray(cols[0])[support.points[:, 0]]
    c2 = np.asarray(cols[1])[support.points[:, 1]]
    keys = list(zip(c1.tolist(), c2.tolist()))
    index = {k: i for i, k in enumerate(sorted(set(keys)))}
    return keys, np.array([index[k] for k in keys])


def simulate_feedback(plan: FeedbackPlan, mode: str = "exhaustive", trials: int = 1000,
                      seed: int | None = 0) -> SimReport:
    """Run the handshake per block and decode with the mode-matched table.

    Each mode's prefix code is designed on the full distribution of its
    color pair; the signaling bits are reported separately, not in the rate.
    """
    sup = plan.support
    fv = sup.fvals
    both = np.array([plan.in_both(m) for m in range(len(fv))], dtype=bool)
    keys_p, codes_p = _pair_codes(plan.c_prime, sup)
    keys_m, codes_m = _pair_codes(plan.c_min, sup)
    len_p = np.array(huffman_lengths(np.bincount(codes_p, weights=sup.probs)))
    len_m = np.array(huffman_lengths(np.bincount(codes_m, weights=sup.probs)))
    table_p, table_m = {}, {}
    for m in range(len(fv)):
        table_p.setdefault(keys_p[m], fv[m])
        if not both[m]:
            table_m.setdefault(keys_m[m], fv[m])

    idx, weights = _sample(sup.probs, mode, trials, seed)
    errors, err_mass, bits, used_prime = 0, 0.0, 0.0, 0.0
    bits_without = float((weights * len_p[codes_p[idx]]).sum())
    for m, w in zip(idx, weights):
        if both[m]:
            out = table_p.get(keys_p[m])
            bits += w * len_p[codes_p[m]]
            used_prime += w
        else:
            out = table_m.get(keys_m[m])
            bits += w * len_m[codes_m[m]]
        if out != fv[m]:
            errors += 1
            err_mass += float(w)
    rate = float(bits) / plan.n
    stats = {
        "P_a": plan.p_a,
        "mode c' usage": float(used_prime),
        "analytic rate with feedback": plan.rate_with,
        "analytic rate without feedback": plan.rate_without,
        "analytic gain": plan.gain,
        "empirical rate with feedback": rate,
        "empirical rate without feedback": bits_without / plan.n,
        "empirical gain": bits_without / plan.n - rate,
        "signaling bits per block": SIGNAL_BITS,
    }
    name, digest = "feedback", ""
    if plan.scenario is not None:
        name, digest = plan.scenario.name or plan.scenario.digest(), plan.scenario.digest()
    return SimReport(name, plan.n, mode, None if mode == "exhaustive" else seed,
                     len(idx), errors, err_mass, (), feedback=stats, scenario_hash=digest)


def empirical_rate_without(plan: FeedbackPlan) -> float:
    """Expected prefix-code length of c' alone, per symbol."""
    _, codes = _pair_codes(plan.c_prime, plan.support)
    dist = np.bincount(codes, weights=plan.support.probs)
    lengths = np.array(huffman_lengths(dist))
    return float((plan.support.probs * lengths[codes]).sum()) / plan.n

