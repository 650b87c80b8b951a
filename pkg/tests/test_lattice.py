import random
from fractions import Fraction
from math import comb

import pytest

from chiralkit.lattice import (
    DEG,
    DEGV,
    DUAL_BASIS,
    VERTICES,
    MPoint,
    MQPoint,
    NPoint,
    argmin_set,
    enum_graded_K,
    enum_graded_Kdual,
    graded_K_array,
    graded_Kdual_array,
    pairing,
    same_cone,
)
from chiralkit.oracle import feasible_same_cone


def test_pairing_examples():
    assert pairing(DEG, DEGV) == 1
    assert pairing(MPoint((5, 0, 0, 0, 0)), VERTICES[0]) == 5
    assert pairing(MQPoint((1, 0, 0, 0, 0)), VERTICES[1]) == 0


def test_duality_all_pairs():
    for i, m in enumerate(DUAL_BASIS):
        for j, v in enumerate(VERTICES):
            assert pairing(m, v) == (1 if i == j else 0)
    for v in VERTICES:
        assert pairing(DEG, v) == 1


def test_pairing_through_dual_basis():
    rng = random.Random(7)
    duals = enum_graded_Kdual(1) + enum_graded_Kdual(2)
    for _ in range(100):
        c = [rng.randint(-6, 6) for _ in range(4)]
        c.append(-sum(c) % 5)
        m = MPoint(c)
        n = rng.choice(duals)
        assert pairing(m, n) == sum(pairing(m, v) * pairing(mi, n) for v, mi in zip(VERTICES, DUAL_BASIS))


@pytest.mark.parametrize("k", range(5))
def test_graded_K_counts(k):
    pts = enum_graded_K(k)
    assert len(pts) == comb(5 * k + 4, 4)
    assert pts == sorted(pts, key=lambda p: p.coords)
    assert all(pairing(p, DEGV) == k for p in pts)
    assert graded_K_array(k).shape == (len(pts), 5)


def test_graded_Kdual_counts():
    assert [len(enum_graded_Kdual(l)) for l in range(5)] == [1, 6, 21, 56, 126]
    assert set(enum_graded_Kdual(1)) == set(VERTICES) | {DEGV}
    for l in range(4):
        assert all(pairing(DEG, n) == l for n in enum_graded_Kdual(l))
        assert graded_Kdual_array(l).shape == (len(enum_graded_Kdual(l)), 5)


def test_membership_validators():
    with pytest.raises(ValueError):
        MPoint((1, 0, 0, 0, 0))
    with pytest.raises(ValueError):
        NPoint((1, 1, 1, 1, 2))
    assert NPoint.from_coords([Fraction(1, 5)] * 5) == DEGV


def test_same_cone_examples():
    v0, v1 = VERTICES[0], VERTICES[1]
    far = NPoint((0, 5, 5, 5, 5))
    assert same_cone(DEGV, v0)
    assert same_cone(v0, v1)
    assert not same_cone(v0, far)
    assert argmin_set(v0) == frozenset({1, 2, 3, 4})
    assert argmin_set(far) == frozenset({0})
    with pytest.raises(ValueError):
        same_cone(-v0, v1)


def test_same_cone_matches_feasibility():
    pts = [p for l in range(1, 5) for p in enum_graded_Kdual(l)]
    rng = random.Random(3)
    pairs = [(rng.choice(pts), rng.choice(pts)) for _ in range(3000)]
    disjoint = 0
    for a, b in pairs:
        assert same_cone(a, b) == feasible_same_cone(a, b) == same_cone(b, a)
        disjoint += not same_cone(a, b)
    assert disjoint > 0


def test_degv_in_every_cone():
    for l in range(4):
        for n in enum_graded_Kdual(l):
            assert same_cone(DEGV, n)
            assert same_cone(n, n)
