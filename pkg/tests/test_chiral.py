import json
import random
from fractions import Fraction

import numpy as np
import pytest

from chiralkit.chiral import (
    GradedDimTable,
    basis_size,
    basis_t,
    cohomology_dims,
    d_squared_nonzeros,
    differential_matrix,
    unblocked_dims,
)
from chiralkit.lattice import DEG, VERTICES, MPoint
from chiralkit.model import FivePolys, GParams, Poly, fermat_model, random_model


def test_basis_counts():
    assert basis_size(0) == 32
    assert basis_size(1) == (126 + 6) * 32
    C2 = basis_t(2)
    with pytest.raises(KeyError):
        C2.index((5, 0, 0, 0, 0), VERTICES[0], ())
    i = C2.index((5, 0, 0, 0, 0), VERTICES[1], (0, 2))
    e = C2.element(i)
    assert e.a == MPoint((5, 0, 0, 0, 0)) and e.b == VERTICES[1] and e.S == frozenset({0, 2})


def test_basis_lex_order_and_invariants():
    P = basis_t(2)
    assert np.all(np.diff(P.keys) > 0)
    assert np.all((P.a * P.b).sum(axis=1) == 0)
    assert np.all(P.a.sum(axis=1) // 5 + P.b.sum(axis=1) // 5 == 2)
    with pytest.raises(ValueError):
        basis_t(1, "C")


def test_d0_on_vacuum():
    F, g = fermat_model()
    D = differential_matrix(0, F, g, "A")
    assert D.shape == (basis_size(1), 32)
    col = {i: v for (i, j), v in D.to_dict().items() if j == 0}
    C1 = basis_t(1)
    want = {C1.index(tuple(5 if k == i else 0 for k in range(5)), (0,) * 5, (i,)): Fraction(5)
            for i in range(5)}
    assert col == want


def test_contraction_sign_and_value():
    F, g = fermat_model()
    D = differential_matrix(0, F, g, "A").to_dict()
    C0, C1 = basis_t(0), basis_t(1)
    src = C0.index((0,) * 5, (0,) * 5, (1, 3))
    # iota_{deg^v}(m_1 ^ m_3) = 1/5 m_3 - 1/5 m_1
    assert D[(C1.index((0,) * 5, (1,) * 5, (3,)), src)] == Fraction(1, 5)
    assert D[(C1.index((0,) * 5, (1,) * 5, (1,)), src)] == Fraction(-1, 5)
    assert D[(C1.index((0,) * 5, VERTICES[3], (1,)), src)] == -1


def test_zero_differential():
    F = FivePolys([Poly.zero(5)] * 5)
    g = GParams({k: 0 for k in ("v0", "v1", "v2", "v3", "v4", "degv")})
    T = cohomology_dims(F, g, "A", 3)
    assert T.totals() == {t: basis_size(t) for t in range(3)}


@pytest.mark.parametrize("ring", ["A", "B"])
def test_d_squared_small(ring):
    rng = random.Random(8)
    for F, g in (fermat_model(), random_model(rng)):
        for t in range(3):
            assert d_squared_nonzeros(t, F, g, ring) == 0


@pytest.mark.parametrize("ring", ["A", "B"])
def test_block_additivity(ring):
    F, g = random_model(random.Random(12))
    T = cohomology_dims(F, g, ring, 3)
    assert T.totals() == unblocked_dims(F, g, ring, 3)


R_CHOICES = [DEG, MPoint((5, 0, 0, 0, 0)), MPoint((2, -1, 0, 3, 1))]


@pytest.mark.parametrize("r", R_CHOICES)
@pytest.mark.parametrize("c", [2, 3])
def test_g_rescaling_invariance(r, c):
    F, g = fermat_model()
    base = cohomology_dims(F, g, "A", 3)
    assert cohomology_dims(F, g.rescaled(c, r), "A", 3) == base


def test_thread_determinism():
    F, g = random_model(random.Random(2))
    one = cohomology_dims(F, g, "B", 3, threads=1)
    four = cohomology_dims(F, g, "B", 3, threads=4)
    assert one.dumps() == four.dumps()


def test_table_serialization():
    F, g = fermat_model()
    T = cohomology_dims(F, g, "A", 3)
    data = json.loads(T.dumps())
    assert data["ring"] == "A" and data["t_max"] == 3
    assert sum(e["dim"] for e in data["dims"]) == sum(T.totals().values())
    assert GradedDimTable.from_json(data) == T
    assert T.to_tsv().splitlines()[0] == "t\tw\tdim"
    assert all(d >= 0 for d in T.dims.values())


def test_tmax_validation():
    F, g = fermat_model()
    with pytest.raises(ValueError):
        cohomology_dims(F, g, "A", 1)
    with pytest.raises(ValueError):
        cohomology_dims(F, g, "C", 3)
