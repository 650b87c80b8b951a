import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chiralkit.lattice import DEGV, VERTICES, enum_graded_K
from chiralkit.model import (
    FivePolys,
    GParams,
    ModelError,
    ModelFormatError,
    Poly,
    corrupted_fermat,
    differential_terms,
    fermat_model,
    from_potential,
    from_witten,
    load_model,
    model_from_dict,
    model_to_dict,
    parse_rational,
    random_model,
    recover_G,
    validate_F,
)

E = lambda *e: tuple(e)  # noqa: E731


def test_fermat_potential():
    F = from_potential(Poly.fermat())
    for i in range(5):
        assert F[i] == Poly.fermat_term(i)


def test_potential_single_monomial():
    F = from_potential(Poly.monomial(E(4, 1, 0, 0, 0)))
    assert F[0] == Poly.monomial(E(4, 1, 0, 0, 0), 4)
    assert F[1] == Poly.monomial(E(4, 1, 0, 0, 0), 1)
    assert all(F[i].is_zero() for i in (2, 3, 4))


def test_potential_rejects_wrong_degree():
    with pytest.raises(ModelError):
        from_potential(Poly.monomial(E(4, 0, 0, 0, 0)))


monomials = st.sampled_from([m.coords for m in enum_graded_K(1)])
coefs = st.fractions(min_value=-5, max_value=5, max_denominator=4).filter(bool)


@settings(max_examples=40, deadline=None)
@given(st.dictionaries(monomials, coefs, min_size=1, max_size=6))
def test_euler_identity(terms):
    f = Poly(terms, 5)
    F = from_potential(f)
    assert F.total() == f.scale(5)
    assert recover_G(F) == f
    assert validate_F(list(F)) == []


def test_witten_examples():
    zero = Poly.zero(5)
    x04, x1_4 = Poly.monomial(E(4, 0, 0, 0, 0)), Poly.monomial(E(0, 4, 0, 0, 0))
    F = from_witten(Poly.fermat(), Gi=[Poly.zero(4)] * 5)
    assert F == from_potential(Poly.fermat())
    G0 = x1_4
    G1 = Poly.monomial(E(1, 3, 0, 0, 0), -1)
    F = from_witten(zero, Gi=[G0, G1] + [Poly.zero(4)] * 3)
    assert F[0] == Poly.monomial(E(1, 4, 0, 0, 0))
    assert F[1] == Poly.monomial(E(1, 4, 0, 0, 0), -1)
    assert recover_G(F).is_zero()
    with pytest.raises(ModelError, match=r"\(1, 4, 0, 0, 0\)"):
        from_witten(zero, Gi=[G0] + [Poly.zero(4)] * 4)
    assert x04.degree == 4


def test_witten_round_trip():
    rng = random.Random(11)
    pool = [m.coords for m in enum_graded_K(1)]
    for _ in range(20):
        G = Poly({rng.choice(pool): Fraction(rng.randint(1, 4)) for _ in range(3)}, 5)
        # x_0 G^0 = h x_0 x_1, x_1 G^1 = -h x_0 x_1 for a random cubic h
        h = Poly({rng.choice([e for e in (m.coords for m in enum_graded_K(1)) if e[0] >= 1 and e[1] >= 1]):
                  Fraction(rng.randint(1, 3))}, 5)
        xG = [h, -h] + [Poly.zero(5)] * 3
        F = from_witten(G, xG=xG)
        assert recover_G(F) == G


def test_validation_and_corruption():
    F, _ = fermat_model()
    assert F.is_valid()
    bad, _ = corrupted_fermat()
    assert not bad.is_valid()
    with pytest.raises(ModelError):
        FivePolys(list(bad))


def test_differential_terms_counts():
    F, g = fermat_model()
    terms = differential_terms(F, g)
    assert sum(t.kind == "M" for t in terms) == 5
    assert sum(t.kind == "N" for t in terms) == 6
    g0 = GParams({n: (0 if n == DEGV else 1) for n, _ in g.items()})
    assert sum(t.kind == "N" for t in differential_terms(F, g0)) == 5


def test_gparams_rescaling():
    g = GParams.uniform(1)
    from chiralkit.lattice import DEG
    r = g.rescaled(2, DEG)
    assert all(v == 2 for _, v in r.items())
    assert r[VERTICES[0]] == 2


def test_model_round_trip(tmp_path):
    F, g = random_model(random.Random(1))
    p = tmp_path / "m.json"
    p.write_text(json.dumps(model_to_dict(F, g)))
    F2, g2 = load_model(p)
    assert F2 == F and g2.to_json() == g.to_json()


def test_model_presentations():
    base = {"format": "chiralkit-model-v1", "g": GParams.uniform(1).to_json()}
    pot = dict(base, presentation="potential", f=Poly.fermat().to_json())
    F, _ = model_from_dict(pot)
    assert F == fermat_model()[0]
    wit = dict(base, presentation="witten", G=Poly.fermat().to_json(), xG=[[] for _ in range(5)])
    F2, _ = model_from_dict(wit)
    assert F2 == F


@pytest.mark.parametrize("mutate,key", [
    (lambda d: d.pop("g"), "g"),
    (lambda d: d["g"].pop("v3"), "g.v3"),
    (lambda d: d["g"].update(v3="x"), "g.v3"),
    (lambda d: d.update(format="other"), "format"),
    (lambda d: d["F"][2][0].update(coef="1/0"), "F[2][0].coef"),
    (lambda d: d["F"][1][0].update(exps=[1, 2]), "F[1][0].exps"),
])
def test_model_format_errors(mutate, key):
    d = model_to_dict(*fermat_model())
    mutate(d)
    with pytest.raises(ModelFormatError) as info:
        model_from_dict(d)
    assert info.value.key == key


def test_parse_rational():
    assert parse_rational("3/6") == Fraction(1, 2)
    with pytest.raises(TypeError):
        parse_rational(0.5)
