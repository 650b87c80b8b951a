import json
import random

import pytest

from chiralkit import checks as C
from chiralkit import ope as E
from chiralkit.lattice import DEGV, VERTICES, MPoint
from chiralkit.model import corrupted_fermat, fermat_model, random_model


def test_report_json_shape():
    rep = C.check_differential_quintic(*fermat_model())
    data = json.loads(rep.dumps())
    assert set(data) == {"check", "pass", "witnesses", "details", "timing_s"}
    assert data["pass"] is True and data["witnesses"] == []


def test_quintic_fermat_and_random():
    assert C.check_differential_quintic(*fermat_model()).passed
    rng = random.Random(9)
    for _ in range(5):
        assert C.check_differential_quintic(*random_model(rng)).passed


def test_quintic_zero_g_passes():
    F, g = fermat_model()
    from chiralkit.model import GParams
    zero = GParams({n: 0 for n, _ in g.items()})
    assert C.check_differential_quintic(F, zero).passed


def test_corrupted_witness():
    rep = C.check_differential_quintic(*corrupted_fermat())
    assert not rep.passed
    w = rep.witnesses[0]
    assert (w["i"], w["m"], w["n"], w["m.n"], w["m_i.n"]) == (0, [0, 5, 0, 0, 0], "v0", "0", "1")


def test_general_ansatz_cases():
    F, g = fermat_model()
    rep = C.check_differential_general(C.GeneralAnsatz.from_quintic(F, g))
    assert rep.passed and rep.details["per_pair_pass"]
    only_m = C.GeneralAnsatz([MPoint((5, 0, 0, 0, 0)), MPoint((0, 5, 0, 0, 0))], [],
                             {(0, (5, 0, 0, 0, 0)): 1, (1, (0, 5, 0, 0, 0)): 2}, {})
    assert C.check_differential_general(only_m).passed
    bad = C.GeneralAnsatz([MPoint((0, 5, 0, 0, 0))], [VERTICES[0]],
                          {(0, (0, 5, 0, 0, 0)): 1}, {(0, VERTICES[0]): 1})
    rep = C.check_differential_general(bad)
    assert not rep.passed and not rep.details["per_pair_pass"]
    assert rep.witnesses[0]["pole"] == -1


def test_general_ansatz_validation():
    with pytest.raises(ValueError):
        C.GeneralAnsatz([MPoint((5, 5, 0, 0, 0))], [], {}, {})
    with pytest.raises(ValueError):
        C.GeneralAnsatz([MPoint((5, 0, 0, 0, 0))], [DEGV], {(0, (0, 5, 0, 0, 0)): 1}, {})


def test_per_pair_implies_full():
    rng = random.Random(4)
    for _ in range(15):
        A = C.random_ansatz(rng)
        rep = C.check_differential_general(A)
        if rep.details["per_pair_pass"]:
            assert rep.passed


@pytest.mark.parametrize("n", [2, 3])
def test_hat_fields(n):
    rep = C.verify_hat_fields(n)
    assert rep.passed, rep.witnesses


def test_residue_examples():
    import sympy
    lm = C.LocalModel(3)
    Y = E.Y
    assert lm.res(E.psi(4)) == E.func(Y[3])
    Q = [sympy.Function(f"Q{i}")(*Y[1:5]) for i in range(1, 5)]
    X = sum((E.func(Q[i - 1]) * E.psi(i) for i in range(1, 5)), E.Field())
    want = sum(Y[4] * lm.P[i] * Q[i - 1] for i in range(1, 4)) + Q[3] * Y[3]
    assert lm.res(X) == E.func(want)
    got = lm.res(E.func(1 / lm.Pn) * E.a(4) * E.psi(3))
    # b^4 a_4 appears as y_4 a_4: b^4 of order 0 is a coefficient symbol
    expected = E.func(Y[4]) * E.a(4) - lm.lnPn_prime
    for j in range(1, 4):
        expected = expected - E.func(lm.P[j] / lm.Pn) * E.phi(j) * E.psi(3)
    assert got == expected


def test_lemma48_printed_and_derived():
    printed = C.verify_hat_LJ(2, "printed")
    derived = C.verify_hat_LJ(2, "derived")
    sub = printed.details["subchecks"]
    assert sub == {"J_printed": False, "J_derived": True, "L_printed": False, "L_derived": True}
    assert not printed.passed
    assert derived.passed


def test_remark_beta():
    rep = C.verify_remark_beta(3)
    assert rep.passed
    assert rep.details["Q_beta_literal"] == "0"


def test_vertop():
    assert C.verify_vertop(seed=1, count=30).passed


def test_sigma_truncation():
    rep = C.verify_sigma_truncation()
    assert rep.passed and rep.details["pairs"] == 27 ** 2
