import itertools
import random
from fractions import Fraction

import pytest
import sympy

from chiralkit import ope as E
from chiralkit.lattice import DEG, DEGV, VERTICES, NPoint

Y = E.Y


def test_basic_free_fields():
    r = E.ope(E.a(1), E.b(1))
    assert r.orders() == [-1] and r[-1] == E.const(1)
    assert E.ope(E.b(1), E.a(1))[-1] == E.const(-1)
    assert E.ope(E.a(1), E.b(2)).is_zero()
    assert E.ope(E.phi(2), E.psi(2))[-1] == E.const(1)
    assert E.ope(E.psi(2), E.phi(2))[-1] == E.const(1)


def test_fermions_anticommute():
    assert (E.phi(1) * E.phi(1)).is_zero()
    assert E.phi(1) * E.psi(2) == -(E.psi(2) * E.phi(1))


def test_composite_rule():
    f = Y[1] ** 2 * Y[2] + sympy.Function("P")(Y[1], Y[2])
    for i in (1, 2):
        assert E.residue_action(E.a(i), E.func(f)) == E.func(sympy.diff(f, Y[i]))


def test_lattice_fermion_pairing_both_orders():
    m, n = (1, 2, 0, 0, 2), (Fraction(3, 5), Fraction(-2, 5), Fraction(3, 5), Fraction(3, 5), Fraction(3, 5))
    mn = sum(Fraction(a) * b for a, b in zip(m, n))
    for A, B in ((E.lattice_ferm(m=m), E.lattice_ferm(n=n)), (E.lattice_ferm(n=n), E.lattice_ferm(m=m))):
        r = E.ope(A, B)
        assert r[-1] == E.const(mn)


def test_exponential_examples():
    r = E.ope(E.expo(m=DEG), E.expo(n=DEGV))
    assert r.is_zero() and r.leading_exponent == 1
    r = E.ope(E.expo(m=(5, 0, 0, 0, 0)), E.expo(n=VERTICES[0]))
    assert r.leading_exponent == 5
    r = E.ope(E.expo(m=(5, 0, 0, 0, 0)), E.expo(m=(0, 5, 0, 0, 0)))
    assert r.leading_exponent == 0
    # momentum of the coefficient is the sum
    m1, n2 = (-5, 0, 0, 0, 5), VERTICES[0]
    r = E.ope(E.expo(m=m1), E.expo(n=n2))
    assert r.leading_exponent == -5
    assert r[-5].momenta() == {E.momentum(m1, n2)}


def test_derivative_of_exponential():
    m = (5, 0, 0, 0, 0)
    assert E.derivative(E.expo(m=m)) == E.lattice_bos(m=m) * E.expo(m=m)


def test_leibniz():
    A = E.normal_product(E.phi(1), E.psi(1))
    assert E.derivative(A) == E.derivative(E.phi(1)) * E.psi(1) + E.phi(1) * E.derivative(E.psi(1))


SINGLES = [E.a(1), E.b(1), E.phi(1), E.psi(1), E.b(2), E.a(2),
           E.lattice_bos(m=(5, 0, 0, 0, 0)), E.lattice_bos(n=VERTICES[0]),
           E.lattice_ferm(m=(1, 0, 0, 0, 0)), E.lattice_ferm(n=VERTICES[0]),
           E.func(Y[1] ** 2)]


def _d_sing(res: E.LaurentOPE):
    """d/dz of sum_k C_k(w) (z-w)^k, singular part."""
    out = {}
    for p, f in res.terms.items():
        out[p - 1] = out.get(p - 1, E.Field()) + f.scale(p)
    return {p: f for p, f in out.items() if not f.is_zero()}


@pytest.mark.parametrize("A,B", list(itertools.product(SINGLES, SINGLES)))
def test_derivative_compatibility(A, B):
    lhs = E.ope(E.derivative(A), B).terms
    assert lhs == _d_sing(E.ope(A, B))


def test_bilinearity():
    A, B, C = E.a(1) * E.phi(1), E.b(1) * E.psi(1), E.func(Y[1]) * E.psi(1)
    lhs = E.ope(A.scale(3) + A, B.scale(2) - C)
    for p in lhs.orders():
        assert lhs[p] == (E.ope(A, B)[p].scale(8) - E.ope(A, C)[p].scale(4))


def test_cocycle_consistency():
    basis = [E.momentum(m=tuple(1 if j == i else 0 for j in range(5))) for i in range(5)]
    basis += [E.momentum(n=tuple(1 if j == i else 0 for j in range(5))) for i in range(5)]
    for x in basis:
        for y in basis:
            assert E.cocycle(x, y) == (-1) ** int(E.pair(x, y)) * E.cocycle(y, x)


@pytest.mark.parametrize("m,n,expected", [
    (None, None, (0, 0)),
    (DEG, None, (1, -1)),
    (None, DEGV, (0, 1)),
    ((5, 0, 0, 0, 0), VERTICES[0], (6, 0)),
    ((0, 0, 0, 0, 5), NPoint((5, 5, 0, 0, 0)), (1, 1)),
])
def test_zero_mode_weight(m, n, expected):
    assert E.zero_mode_weight(m, n) == expected


def test_zero_mode_closed_form():
    rng = random.Random(5)
    from chiralkit.lattice import enum_graded_Kdual, pairing, MPoint
    duals = enum_graded_Kdual(1) + enum_graded_Kdual(2)
    for _ in range(20):
        c = [rng.randint(-3, 3) for _ in range(4)]
        c.append(-sum(c) % 5)
        m, n = MPoint(c), rng.choice(duals)
        assert E.zero_mode_weight(m, n) == (pairing(m, n) + pairing(m, DEGV), pairing(DEG, n) - pairing(m, DEGV))


def test_sigma_truncation_examples():
    v0, v1, far = VERTICES[0], VERTICES[1], NPoint((0, 5, 5, 5, 5))
    m = (5, 0, 0, 0, -5)
    assert E.sigma_truncated_ope(E.expo(m=m, n=v0), E.expo(n=far)).is_zero()
    assert not E.ope(E.expo(m=m, n=v0), E.expo(n=far)).is_zero()
    A, B = E.expo(m=m, n=v0), E.expo(m=(-5, 0, 0, 0, 5), n=v1)
    full, trunc = E.ope(A, B), E.sigma_truncated_ope(A, B)
    assert not full.is_zero()
    assert full.terms == trunc.terms
    zero_n = E.sigma_truncated_ope(E.expo(m=m), E.expo(n=far))
    assert zero_n.leading_exponent == -5
    assert zero_n.terms == E.ope(E.expo(m=m), E.expo(n=far)).terms
    with pytest.raises(E.OPEError):
        E.sigma_truncated_ope(E.expo(n=-v0), E.expo(n=v1))


def test_factor_cap():
    X = E.const(1)
    for i in range(1, 9):
        X = X * E.a(i) * E.b(i, 1)
    with pytest.raises(E.OPEError):
        X * E.a(9)
