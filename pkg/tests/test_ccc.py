import numpy as np
import pytest

from funcomp.ccc import (InvalidColoringError, JointSupport, NotCCCError, build_lookup,
                         check_zigzag, joint_coloring_family, satisfies_ccc)
from funcomp.core import make_scenario

from conftest import fixture


def family(name, cols):
    s = fixture(name)
    return joint_coloring_family(cols, JointSupport.from_scenario(s))


def test_trivial_colors_one_class_per_point():
    fam = family("mod2", [[0, 1, 2, 3], [0, 1]])
    assert len(fam.classes) == 8
    assert all(len(c.members) == 1 for c in fam.classes)


def test_example2_single_color():
    fam = family("example2", [[0, 0], [0, 0]])
    assert len(fam.classes) == 1
    pts = {tuple(fam.support.points[m]) for m in fam.classes[0].members}
    assert pts == {(0, 0), (1, 1)}
    res = satisfies_ccc(fam)
    assert not res.ok
    assert {res.witness.f_a, res.witness.f_b} == {0, 1}


def test_example1_classes():
    # colour {0,2} / {1,3} on X1, distinct colours on X2: 8 points in 4 classes
    fam = family("mod2", [[0, 1, 0, 1], [0, 1]])
    assert len(fam.classes) == 4
    assert all(len(c.members) == 2 for c in fam.classes)
    assert satisfies_ccc(fam).ok


def test_fig6a_connected():
    fam = family("fig6a", [[0, 0], [0, 0]])
    assert satisfies_ccc(fam).ok


def test_fig6b_two_components():
    fam = family("fig6b", [[0, 0], [0, 0]])
    res = satisfies_ccc(fam)
    assert not res.ok
    assert len(fam.classes[0].components) == 2


def test_nozigzag_trivial_on_one_side():
    rng = np.random.default_rng(1)
    from conftest import random_two_source, random_valid_coloring
    from funcomp.chargraph import characteristic_graph
    for _ in range(50):
        s = random_two_source(rng)
        c1 = random_valid_coloring(characteristic_graph(s, 0), rng)
        fam = joint_coloring_family([c1, list(range(s.alphabets[1]))], JointSupport.from_scenario(s))
        assert satisfies_ccc(fam).ok


def test_invalid_coloring_raises():
    # f varies across a one-coordinate step inside a class
    with pytest.raises(InvalidColoringError):
        satisfies_ccc(family("mod2", [[0, 0, 0, 0], [0, 1]]))


def test_zigzag_cases():
    full = make_scenario([2, 2], np.full(4, 0.25), [[0, 1, 1, 0]])
    assert check_zigzag(full)
    assert not check_zigzag(fixture("example2"))
    assert check_zigzag(fixture("fig6a"))


def test_lookup_tables():
    parity = make_scenario([2, 2], np.full(4, 0.25), [[0, 1, 1, 0]])
    table = build_lookup(joint_coloring_family([[0, 1], [0, 1]], JointSupport.from_scenario(parity)))
    assert table == {(0, 0): 0, (0, 1): 1, (1, 0): 1, (1, 1): 0}
    table = build_lookup(family("mod2", [[0, 1, 0, 1], [0, 1]]))
    assert table == {(0, 0): 0, (0, 1): 1, (1, 0): 1, (1, 1): 0}
    const = make_scenario([2, 2], np.full(4, 0.25), [[3, 3, 3, 3]])
    assert build_lookup(joint_coloring_family([[0, 0], [0, 0]], JointSupport.from_scenario(const))) == {(0, 0): 3}


def test_lookup_rejects_violation():
    with pytest.raises(NotCCCError):
        build_lookup(family("example2", [[0, 0], [0, 0]]))
