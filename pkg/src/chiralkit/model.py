"""Input data for the (0,2) quintic: the polynomials F^i = x_i R^i and g_n.

Three presentations are accepted (five F^i directly, Witten's (G, G^i), or a
potential f with F^i = x_i d_i f); internally everything becomes a FivePolys.
Coefficients are exact rationals throughout.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .lattice import (
    DEGV,
    DIM,
    DUAL_BASIS,
    VERTICES,
    MPoint,
    NPoint,
    enum_graded_K,
    enum_graded_Kdual,
)

MODEL_FORMAT = "chiralkit-model-v1"


class ModelError(ValueError):
    """Invalid polynomial data (wrong degree, violated constraint, ...)."""


class ModelFormatError(ModelError):
    """Malformed model file; `key` points at the offending entry."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


def parse_rational(value) -> Fraction:
    if isinstance(value, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"coefficient must be an exact rational string, got {value!r}")


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


class Poly:
    """Homogeneous polynomial in x_0..x_4 with rational coefficients.

    `terms` maps exponent 5-tuples to nonzero Fractions.
    """

    __slots__ = ("terms", "degree")

    def __init__(self, terms=None, degree: int | None = None):
        clean = {}
        for exps, coef in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != DIM or min(exps) < 0:
                raise ModelError(f"bad exponent vector {exps}")
            coef = Fraction(coef)
            if coef:
                clean[exps] = clean.get(exps, 0) + coef
                if not clean[exps]:
                    del clean[exps]
        degrees = {sum(e) for e in clean}
        if degree is None:
            if len(degrees) > 1:
                raise ModelError(f"inhomogeneous polynomial, degrees {sorted(degrees)}")
            degree = degrees.pop() if degrees else 0
        elif degrees - {degree}:
            raise ModelError(f"expected degree {degree}, found terms of degree {sorted(degrees)}")
        self.terms = clean
        self.degree = degree

    @classmethod
    def monomial(cls, exps, coef=1) -> "Poly":
        return cls({tuple(exps): Fraction(coef)})

    @classmethod
    def fermat_term(cls, i: int, coef=5) -> "Poly":
        return cls.monomial(tuple(5 * (i == j) for j in range(DIM)), coef)

    @classmethod
    def zero(cls, degree: int) -> "Poly":
        return cls({}, degree)

    @classmethod
    def fermat(cls, coef=1) -> "Poly":
        return cls({tuple(5 * (i == j) for j in range(DIM)): Fraction(coef) for i in range(DIM)})

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        if self.is_zero() and other.is_zero():
            return True
        return self.degree == other.degree and self.terms == other.terms

    def __hash__(self):
        return hash((self.degree, frozenset(self.terms.items())))

    def _combine(self, other, sign):
        if self.is_zero():
            deg = other.degree
        elif other.is_zero():
            deg = self.degree
        elif self.degree != other.degree:
            raise ModelError("cannot add polynomials of different degree")
        else:
            deg = self.degree
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, 0) + sign * c
        return Poly(terms, deg)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return Poly({e: -c for e, c in self.terms.items()}, self.degree)

    def scale(self, c) -> "Poly":
        return Poly({e: c * v for e, v in self.terms.items()}, self.degree)

    def times_x(self, i: int) -> "Poly":
        terms = {}
        for e, c in self.terms.items():
            e = list(e)
            e[i] += 1
            terms[tuple(e)] = c
        return Poly(terms, self.degree + 1)

    def diff(self, i: int) -> "Poly":
        terms = {}
        for e, c in self.terms.items():
            if e[i]:
                e2 = list(e)
                e2[i] -= 1
                terms[tuple(e2)] = c * e[i]
        return Poly(terms, max(self.degree - 1, 0))

    def restrict_zero(self, i: int) -> "Poly":
        """The polynomial with x_i set to zero."""
        return Poly({e: c for e, c in self.terms.items() if e[i] == 0}, self.degree)

    def to_json(self) -> list:
        return [{"exps": list(e), "coef": format_rational(c)} for e, c in sorted(self.terms.items())]

    @classmethod
    def from_json(cls, data, degree=None, key="poly") -> "Poly":
        if not isinstance(data, list):
            raise ModelFormatError(key, "expected a list of terms")
        terms = {}
        for idx, item in enumerate(data):
            k = f"{key}[{idx}]"
            if not isinstance(item, dict) or "exps" not in item or "coef" not in item:
                raise ModelFormatError(k, "term needs 'exps' and 'coef'")
            exps = item["exps"]
            if (not isinstance(exps, list) or len(exps) != DIM
                    or not all(isinstance(e, int) and not isinstance(e, bool) and e >= 0 for e in exps)):
                raise ModelFormatError(k + ".exps", "expected 5 nonnegative integers")
            try:
                coef = parse_rational(item["coef"])
            except (TypeError, ValueError, ZeroDivisionError) as exc:
                raise ModelFormatError(k + ".coef", str(exc)) from None
            terms[tuple(exps)] = terms.get(tuple(exps), 0) + coef
        try:
            return cls(terms, degree)
        except ModelError as exc:
            raise ModelFormatError(key, str(exc)) from None

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in sorted(self.terms.items(), reverse=True):
            mono = "*".join(f"x{i}^{p}" if p > 1 else f"x{i}" for i, p in enumerate(e) if p)
            parts.append(f"{format_rational(c)}*{mono}" if mono else format_rational(c))
        return " + ".join(parts)


def validate_F(F) -> list:
    """Offending (i, exponent) pairs with e_i == 0 in a nonzero term of F^i."""
    bad = []
    for i, p in enumerate(F):
        for e in sorted(p.terms):
            if e[i] == 0:
                bad.append((i, e))
    return bad


class FivePolys:
    """The five degree-5 polynomials F^0..F^4 with F^i vanishing on x_i = 0.

    `check=False` skips the vanishing condition; it exists so that the
    differential checker can be shown invalid data and report why.
    """

    __slots__ = ("F",)

    def __init__(self, F, check: bool = True):
        F = tuple(F)
        if len(F) != DIM:
            raise ModelError(f"need {DIM} polynomials, got {len(F)}")
        for i, p in enumerate(F):
            if not p.is_zero() and p.degree != 5:
                raise ModelError(f"F^{i} has degree {p.degree}, expected 5")
        F = tuple(p if not p.is_zero() else Poly.zero(5) for p in F)
        if check:
            bad = validate_F(F)
            if bad:
                i, e = bad[0]
                raise ModelError(f"F^{i} contains x^{e}, which does not vanish on x_{i} = 0")
        self.F = F

    def __getitem__(self, i):
        return self.F[i]

    def __iter__(self):
        return iter(self.F)

    def __eq__(self, other):
        return isinstance(other, FivePolys) and self.F == other.F

    def is_valid(self) -> bool:
        return not validate_F(self.F)

    def total(self) -> Poly:
        out = Poly.zero(5)
        for p in self.F:
            out = out + p
        return out

    def R(self) -> list:
        """The degree-4 polynomials R^i = F^i / x_i."""
        out = []
        for i, p in enumerate(self.F):
            terms = {}
            for e, c in p.terms.items():
                if e[i] == 0:
                    raise ModelError(f"F^{i} is not divisible by x_{i}")
                e2 = list(e)
                e2[i] -= 1
                terms[tuple(e2)] = c
            out.append(Poly(terms, 4))
        return out

    def scale(self, c) -> "FivePolys":
        return FivePolys([p.scale(c) for p in self.F], check=False)

    def to_json(self) -> list:
        return [p.to_json() for p in self.F]

    def __repr__(self):
        return "FivePolys(" + "; ".join(repr(p) for p in self.F) + ")"


def from_potential(f: Poly) -> FivePolys:
    """F^i = x_i * d_i f, the logarithmic derivatives of a quintic f."""
    if not f.is_zero() and f.degree != 5:
        raise ModelError(f"potential must have degree 5, got {f.degree}")
    return FivePolys([f.diff(i).times_x(i) if not f.is_zero() else Poly.zero(5) for i in range(DIM)])


def from_witten(G: Poly, xG=None, Gi=None) -> FivePolys:
    """F^i = x_i (d_i G + G^i) from Witten's data with sum_i x_i G^i = 0.

    The G^i are given either raw (`Gi`, degree 4) or pre-multiplied (`xG`,
    degree 5, xG[i] = x_i G^i).
    """
    if (xG is None) == (Gi is None):
        raise ModelError("give exactly one of xG or Gi")
    if not G.is_zero() and G.degree != 5:
        raise ModelError(f"G must have degree 5, got {G.degree}")
    if Gi is not None:
        if len(Gi) != DIM:
            raise ModelError("need five G^i")
        for i, p in enumerate(Gi):
            if not p.is_zero() and p.degree != 4:
                raise ModelError(f"G^{i} must have degree 4")
        xG = [p.times_x(i) if not p.is_zero() else Poly.zero(5) for i, p in enumerate(Gi)]
    xG = list(xG)
    if len(xG) != DIM:
        raise ModelError("need five x_i G^i")
    for i, p in enumerate(xG):
        if p.is_zero():
            continue
        if p.degree != 5:
            raise ModelError(f"x_{i} G^{i} must have degree 5")
        for e in p.terms:
            if e[i] == 0:
                raise ModelError(f"xG[{i}] has monomial {e} not divisible by x_{i}")
    constraint = Poly.zero(5)
    for p in xG:
        constraint = constraint + p
    if not constraint.is_zero():
        e, c = min(constraint.terms.items())
        raise ModelError(f"sum_i x_i G^i != 0: monomial {e} has coefficient {format_rational(c)}")
    F = []
    for i in range(DIM):
        dG = G.diff(i).times_x(i) if not G.is_zero() else Poly.zero(5)
        F.append(dG + xG[i])
    return FivePolys(F)


def recover_G(F: FivePolys) -> Poly:
    """G = (1/5) sum_i F^i."""
    return F.total().scale(Fraction(1, DIM))


DUAL_KEYS = ("v0", "v1", "v2", "v3", "v4", "degv")


def dual_point_for_key(key: str) -> NPoint:
    if key == "degv":
        return DEGV
    return VERTICES[int(key[1:])]


def key_for_dual_point(n: NPoint) -> str:
    if n == DEGV:
        return "degv"
    return f"v{VERTICES.index(n)}"


class GParams:
    """Coefficients g_n for the six points of Delta^v."""

    __slots__ = ("values",)

    def __init__(self, values):
        vals = {}
        for key, v in dict(values).items():
            n = dual_point_for_key(key) if isinstance(key, str) else key
            vals[n] = Fraction(v)
        if set(vals) != set(enum_graded_Kdual(1)):
            raise ModelError("g needs exactly the six points of Delta^v")
        self.values = vals

    @classmethod
    def uniform(cls, value=1) -> "GParams":
        return cls({k: value for k in DUAL_KEYS})

    def __getitem__(self, n):
        return self.values[n]

    def items(self):
        return sorted(self.values.items())

    def rescaled(self, c, r) -> "GParams":
        """g_n -> c^{r(n)} g_n for r an element of M acting linearly on N."""
        from .lattice import pairing
        out = {}
        for n, v in self.values.items():
            e = pairing(r, n)
            if e.denominator != 1:
                raise ModelError("rescaling exponent must be integral")
            out[n] = v * Fraction(c) ** int(e)
        return GParams(out)

    def to_json(self) -> dict:
        return {key_for_dual_point(n): format_rational(v) for n, v in sorted(self.values.items())}

    def __repr__(self):
        return f"GParams({self.to_json()})"


@dataclass(frozen=True)
class DifferentialTerm:
    """One summand of the differential: coefficient * fermion * e^{momentum}.

    kind "M": momentum in Delta, fermion m_i (index i); kind "N": momentum n in
    Delta^v and fermion n itself.
    """

    kind: str
    momentum: object
    fermion: object
    coefficient: Fraction
    index: int | None = None


def differential_terms(F: FivePolys, g: GParams) -> list:
    terms = []
    for i, p in enumerate(F):
        for e, c in sorted(p.terms.items()):
            terms.append(DifferentialTerm("M", MPoint(e), DUAL_BASIS[i], c, i))
    for n, c in g.items():
        if c:
            terms.append(DifferentialTerm("N", n, n, c))
    return terms


def potential_terms(f: Poly) -> list:
    """The M-part of D_{f,g} written as f_m m^ferm with m^ferm expanded in m_i.

    Returns (m, coefficient vector over m_0..m_4); m^ferm = sum_i (m . v_i) m_i^ferm.
    """
    from .lattice import pairing
    out = []
    for e, c in sorted(f.terms.items()):
        m = MPoint(e)
        out.append((m, tuple(c * pairing(m, v) for v in VERTICES)))
    return out


# -- model files --------------------------------------------------------------

def _require(data, key, where=""):
    if key not in data:
        raise ModelFormatError(where + key, "missing")
    return data[key]


def model_from_dict(data: dict, check: bool = True):
    """Parse a model document; returns (FivePolys, GParams)."""
    if not isinstance(data, dict):
        raise ModelFormatError("$", "model must be a JSON object")
    fmt = _require(data, "format")
    if fmt != MODEL_FORMAT:
        raise ModelFormatError("format", f"expected {MODEL_FORMAT!r}, got {fmt!r}")
    pres = _require(data, "presentation")
    try:
        if pres == "F":
            raw = _require(data, "F")
            if not isinstance(raw, list) or len(raw) != DIM:
                raise ModelFormatError("F", "expected a list of 5 polynomials")
            polys = [Poly.from_json(p, None, f"F[{i}]") for i, p in enumerate(raw)]
            F = FivePolys(polys, check=check)
        elif pres == "potential":
            f = Poly.from_json(_require(data, "f"), None, "f")
            F = from_potential(f)
        elif pres == "witten":
            G = Poly.from_json(_require(data, "G"), None, "G")
            if "xG" in data:
                raw = data["xG"]
                if not isinstance(raw, list) or len(raw) != DIM:
                    raise ModelFormatError("xG", "expected a list of 5 polynomials")
                F = from_witten(G, xG=[Poly.from_json(p, None, f"xG[{i}]") for i, p in enumerate(raw)])
            elif "Gi" in data:
                raw = data["Gi"]
                if not isinstance(raw, list) or len(raw) != DIM:
                    raise ModelFormatError("Gi", "expected a list of 5 polynomials")
                F = from_witten(G, Gi=[Poly.from_json(p, None, f"Gi[{i}]") for i, p in enumerate(raw)])
            else:
                raise ModelFormatError("xG", "missing (or give Gi)")
        else:
            raise ModelFormatError("presentation", f"unknown presentation {pres!r}")
    except ModelFormatError:
        raise
    except ModelError as exc:
        raise ModelFormatError(pres if pres != "F" else "F", str(exc)) from None
    graw = _require(data, "g")
    if not isinstance(graw, dict):
        raise ModelFormatError("g", "expected an object keyed by v0..v4, degv")
    for key in graw:
        if key not in DUAL_KEYS:
            raise ModelFormatError(f"g.{key}", "unknown point of Delta^v")
    vals = {}
    for key in DUAL_KEYS:
        if key not in graw:
            raise ModelFormatError(f"g.{key}", "missing")
        try:
            vals[key] = parse_rational(graw[key])
        except (TypeError, ValueError, ZeroDivisionError) as exc:
            raise ModelFormatError(f"g.{key}", str(exc)) from None
    return F, GParams(vals)


def load_model(path, check: bool = True):
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ModelFormatError("$", f"invalid JSON: {exc}") from None
    return model_from_dict(data, check=check)


def model_to_dict(F: FivePolys, g: GParams) -> dict:
    return {"format": MODEL_FORMAT, "presentation": "F", "F": F.to_json(), "g": g.to_json()}


def fermat_model() -> tuple:
    return from_potential(Poly.fermat()), GParams.uniform(1)


def corrupted_fermat() -> tuple:
    """Fermat data with x_1^5 added to F^0, bypassing validation."""
    F, g = fermat_model()
    bad = F[0] + Poly.monomial((0, 5, 0, 0, 0))
    return FivePolys([bad] + list(F)[1:], check=False), g


def random_model(rng, extras: int = 2, g_range=(-3, 3)) -> tuple:
    """Fermat F^i = 5 x_i^5 plus `extras` random monomials divisible by x_i
    with small rational coefficients, and random nonzero g.

    Kept sparse on purpose: denser random F make the exact rank computations
    fill in badly without changing what the tests exercise.
    """
    pool = [e for e in (m.coords for m in _delta())]
    F = []
    for i in range(DIM):
        p = Poly.fermat_term(i)
        for e in rng.sample([e for e in pool if 1 <= e[i] < 5], extras):
            p = p + Poly.monomial(e, Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.choice([1, 1, 2])))
        F.append(p)
    vals = {}
    for key in DUAL_KEYS:
        c = 0
        while c == 0:
            c = rng.randint(*g_range)
        vals[key] = Fraction(c, rng.choice([1, 2]))
    return FivePolys(F), GParams(vals)


def _delta():
    return enum_graded_K(1)
