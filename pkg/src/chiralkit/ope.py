"""Free-field vertex algebra calculator with lattice exponentials.

Generators are the bc-beta-gamma system a_i, b^i, phi^i, psi_i and the
lattice bosons/fermions of M_Q + N_Q written in coordinates:

    a_i(z) b^k(w)          ~ delta / (z-w)
    phi^i(z) psi_k(w)      ~ delta / (z-w)     (same for psi(z) phi(w))
    M_k^ferm(z) N_l^ferm(w) ~ delta / (z-w)     (same in the other order)
    M_k^bos(z) N_l^bos(w)   ~ delta / (z-w)^2
    x^bos(z) e^{int y}(w)   ~ <x, y> e^{int y}(w) / (z-w)

with <(m1,n1),(m2,n2)> = m1.n2 + m2.n1.  A Field is a finite sum of monomials
coefficient * (free normal ordered product of generator factors) * e^{int x}.
Functions of b are not factors: the order-0 field b^k is the symbol y_k and
enters only through the coefficient, which is a sympy expression in y_k (and
possibly undefined functions of them and free parameters) or a Fraction.
Because free normal ordering is graded commutative, each monomial has a
canonical sorted form, which makes equality of fields a syntactic test.

OPEs are computed with Wick's theorem: every admissible set of contractions
between the two monomials, the composite rule a_i(z) f(b(w)) ~ d_i f/(z-w),
the exponential factor eps(x,y) (z-w)^{<x,y>}, and Taylor expansion of the
uncontracted z-dependent part around w.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import sympy

from .lattice import DIM, MPoint, MQPoint, NPoint, argmin_set

KIND_B, KIND_A, KIND_PHI, KIND_PSI, KIND_MBOS, KIND_NBOS, KIND_MFERM, KIND_NFERM = range(8)
KIND_NAMES = ("b", "a", "phi", "psi", "mbos", "nbos", "mferm", "nferm")
FERMIONIC = frozenset({KIND_PHI, KIND_PSI, KIND_MFERM, KIND_NFERM})
FACTOR_CAP = 16
MAX_INDEX = 16
LEAD_SEARCH = 6

Y = tuple(sympy.Symbol(f"y{k}") for k in range(MAX_INDEX))
_Y_INDEX = {s: k for k, s in enumerate(Y)}

# (kind at z, kind at w) -> (pole order, sign); labels must agree
_PROPAGATORS = {
    (KIND_A, KIND_B): (1, 1),
    (KIND_B, KIND_A): (1, -1),
    (KIND_PHI, KIND_PSI): (1, 1),
    (KIND_PSI, KIND_PHI): (1, 1),
    (KIND_MFERM, KIND_NFERM): (1, 1),
    (KIND_NFERM, KIND_MFERM): (1, 1),
    (KIND_MBOS, KIND_NBOS): (2, 1),
    (KIND_NBOS, KIND_MBOS): (2, 1),
}


class OPEError(ValueError):
    pass


# -- coefficient ring ---------------------------------------------------------

def _canon(expr):
    e = sympy.expand(expr)
    if e.is_Rational:
        return Fraction(int(e.p), int(e.q))
    return e


def coerce(c):
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int) and not isinstance(c, bool):
        return Fraction(c)
    return _canon(sympy.sympify(c))


def _sym(c):
    return sympy.Rational(c.numerator, c.denominator) if isinstance(c, Fraction) else c


def _cmul(c1, c2):
    if isinstance(c1, Fraction) and isinstance(c2, Fraction):
        return c1 * c2
    return _canon(_sym(c1) * _sym(c2))


def _cadd(c1, c2):
    if isinstance(c1, Fraction) and isinstance(c2, Fraction):
        return c1 + c2
    return _canon(_sym(c1) + _sym(c2))


def _czero(c) -> bool:
    return c == 0


def _cdiff(c, k: int):
    if isinstance(c, Fraction):
        return Fraction(0)
    return _canon(sympy.diff(c, Y[k]))


def _ysupport(c) -> list:
    if isinstance(c, Fraction):
        return []
    return sorted(_Y_INDEX[s] for s in c.free_symbols if s in _Y_INDEX)


# -- lattice momenta ----------------------------------------------------------

def _mvec(m) -> tuple:
    if m is None:
        return (Fraction(0),) * DIM
    if isinstance(m, (MPoint, MQPoint)):
        m = m.coords
    m = tuple(Fraction(c) for c in m)
    if len(m) != DIM:
        raise OPEError("M-component must have 5 coordinates")
    return m


def _nvec(n) -> tuple:
    if n is None:
        return (Fraction(0),) * DIM
    if isinstance(n, NPoint):
        n = n.coords
    n = tuple(Fraction(c) for c in n)
    if len(n) != DIM:
        raise OPEError("N-component must have 5 coordinates")
    return n


def momentum(m=None, n=None):
    """Canonical momentum key: 10 Fractions (m coords, n coords), or None for 0."""
    x = _mvec(m) + _nvec(n)
    return x if any(x) else None


def pair(x, y) -> Fraction:
    """<x, y> = m_x.n_y + m_y.n_x."""
    if x is None or y is None:
        return Fraction(0)
    return sum((x[k] * y[DIM + k] + y[k] * x[DIM + k] for k in range(DIM)), Fraction(0))


def _add_mom(x, y):
    if x is None:
        return y
    if y is None:
        return x
    s = tuple(a + b for a, b in zip(x, y))
    return s if any(s) else None


def cocycle(x, y) -> int:
    """eps(x, y) = (-1)^{m_y . n_x}.

    With the ordered basis (M-basis, then N-basis) and eps(e_a, e_b) =
    (-1)^{<e_a, e_b>} for a > b, bimultiplicativity leaves only the pairings of
    N-basis vectors of x with M-basis vectors of y.  For dual bases those
    pairings are exactly m_y . n_x, so the sign is basis independent.
    """
    if x is None or y is None:
        return 1
    e = sum((y[k] * x[DIM + k] for k in range(DIM)), Fraction(0))
    if e.denominator != 1:
        raise OPEError("cocycle needs lattice momenta")
    return -1 if e.numerator % 2 else 1


def _bos_pair(g, x) -> Fraction:
    """<g, x> for a lattice boson generator g and momentum x."""
    if x is None:
        return Fraction(0)
    kind, k, _ = g
    return x[DIM + k] if kind == KIND_MBOS else x[k]


# -- monomials ----------------------------------------------------------------

def _sort_factors(gens):
    """Canonical order with the sign of the fermionic permutation; sign 0 if a
    fermion repeats."""
    gens = list(gens)
    sign = 1
    for i in range(1, len(gens)):
        j = i
        while j > 0 and gens[j - 1] > gens[j]:
            if gens[j - 1][0] in FERMIONIC and gens[j][0] in FERMIONIC:
                sign = -sign
            gens[j - 1], gens[j] = gens[j], gens[j - 1]
            j -= 1
    for i in range(1, len(gens)):
        if gens[i] == gens[i - 1] and gens[i][0] in FERMIONIC:
            return 0, None
    if len(gens) > FACTOR_CAP:
        raise OPEError(f"monomial with {len(gens)} factors exceeds the cap of {FACTOR_CAP}")
    return sign, tuple(gens)


def _parity(seq) -> int:
    inv = 0
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                inv += 1
    return -1 if inv % 2 else 1


class Field:
    """Finite sum of normal ordered monomials; immutable by convention.

    `terms` maps (factors, momentum) to a nonzero coefficient.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        for key, c in (terms or {}).items():
            self._acc(key, coerce(c))

    def _acc(self, key, c):
        if _czero(c):
            return
        old = self.terms.get(key)
        if old is None:
            self.terms[key] = c
        else:
            new = _cadd(old, c)
            if _czero(new):
                del self.terms[key]
            else:
                self.terms[key] = new

    def copy(self) -> "Field":
        out = Field()
        out.terms = dict(self.terms)
        return out

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other):
        other = as_field(other)
        out = self.copy()
        for key, c in other.terms.items():
            out._acc(key, c)
        return out

    __radd__ = __add__

    def __neg__(self):
        out = Field()
        out.terms = {k: -c for k, c in self.terms.items()}
        return out

    def __sub__(self, other):
        return self + (-as_field(other))

    def __rsub__(self, other):
        return as_field(other) - self

    def scale(self, c) -> "Field":
        c = coerce(c)
        out = Field()
        for key, v in self.terms.items():
            out._acc(key, _cmul(c, v))
        return out

    def __mul__(self, other):
        if not isinstance(other, Field):
            return self.scale(other)
        out = Field()
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                if k1[1] is not None and k2[1] is not None:
                    raise OPEError("product of two exponentials is not free; use normal_product")
                prod = _mono_mul(k1, c1, k2, c2)
                if prod is not None:
                    out._acc(*prod)
        return out

    def __rmul__(self, other):
        return self.scale(other)

    def __eq__(self, other):
        try:
            other = as_field(other)
        except TypeError:
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def momenta(self) -> set:
        return {x for _, x in self.terms}

    def max_factors(self) -> int:
        return max((len(f) for f, _ in self.terms), default=0)

    def coefficient_of(self, other: "Field"):
        """c with self == c * other for a single-monomial `other`, else None."""
        if len(other.terms) != 1:
            raise OPEError("coefficient_of needs a single monomial")
        (key, c0), = other.terms.items()
        if self.is_zero():
            return Fraction(0)
        if set(self.terms) != {key}:
            return None
        return coerce(_sym(self.terms[key]) / _sym(c0))

    def __repr__(self):
        return pretty(self)


def as_field(x) -> Field:
    if isinstance(x, Field):
        return x
    if isinstance(x, (int, Fraction, sympy.Basic)) and not isinstance(x, bool):
        return Field({((), None): x})
    raise TypeError(f"cannot interpret {x!r} as a field")


def _mono_mul(k1, c1, k2, c2):
    sign, facs = _sort_factors(k1[0] + k2[0])
    if not sign:
        return None
    c = _cmul(c1, c2)
    if sign < 0:
        c = -c
    return (facs, _add_mom(k1[1], k2[1])), c


def _gen(kind: int, label: int, order: int = 0) -> tuple:
    if kind not in range(8):
        raise OPEError(f"unknown generator kind {kind}")
    if kind == KIND_B and order == 0:
        raise OPEError("order-0 b lives in the coefficient ring")
    if not 0 <= label < MAX_INDEX or order < 0:
        raise OPEError("generator label or derivative order out of range")
    return (kind, label, order)


def _single(kind, label, order=0) -> Field:
    if kind == KIND_B and order == 0:
        return Field({((), None): Y[label]})
    return Field({((_gen(kind, label, order),), None): 1})


# -- constructors -------------------------------------------------------------

def a(i: int, order: int = 0) -> Field:
    return _single(KIND_A, i, order)


def b(i: int, order: int = 0) -> Field:
    return _single(KIND_B, i, order)


def phi(i: int, order: int = 0) -> Field:
    return _single(KIND_PHI, i, order)


def psi(i: int, order: int = 0) -> Field:
    return _single(KIND_PSI, i, order)


def func(expr) -> Field:
    """A coefficient function of the b^k (use the symbols Y[k])."""
    return as_field(coerce(expr))


def const(c) -> Field:
    return as_field(coerce(c))


def lattice_bos(m=None, n=None) -> Field:
    """(m, n)^bos expanded in the coordinate bosons."""
    out = Field()
    for k, c in enumerate(_mvec(m)):
        out._acc(((_gen(KIND_MBOS, k),), None), c)
    for k, c in enumerate(_nvec(n)):
        out._acc(((_gen(KIND_NBOS, k),), None), c)
    return out


def lattice_ferm(m=None, n=None) -> Field:
    """(m, n)^ferm expanded in the coordinate fermions."""
    out = Field()
    for k, c in enumerate(_mvec(m)):
        out._acc(((_gen(KIND_MFERM, k),), None), c)
    for k, c in enumerate(_nvec(n)):
        out._acc(((_gen(KIND_NFERM, k),), None), c)
    return out


def expo(m=None, n=None, coefficient=1) -> Field:
    """The vertex operator e^{int (m,n)^bos}."""
    return Field({((), momentum(m, n)): coefficient})


# -- derivative ---------------------------------------------------------------

def _mono_derivative(key, c, out: Field):
    facs, x = key
    for k in _ysupport(c):
        dc = _cdiff(c, k)
        if not _czero(dc):
            prod = _mono_mul(((_gen(KIND_B, k, 1),), None), Fraction(1), (facs, x), dc)
            if prod is not None:
                out._acc(*prod)
    for i, g in enumerate(facs):
        new = facs[:i] + ((g[0], g[1], g[2] + 1),) + facs[i + 1:]
        sign, new = _sort_factors(new)
        if sign:
            out._acc((new, x), c if sign > 0 else -c)
    if x is not None:
        for k in range(DIM):
            for kind, coeff in ((KIND_MBOS, x[k]), (KIND_NBOS, x[DIM + k])):
                if coeff:
                    prod = _mono_mul(((_gen(kind, k),), None), coeff, (facs, x), c)
                    if prod is not None:
                        out._acc(*prod)


def derivative(A: Field, times: int = 1) -> Field:
    """The world-sheet derivative d/dz, applied `times` times."""
    A = as_field(A)
    for _ in range(times):
        out = Field()
        for key, c in A.terms.items():
            _mono_derivative(key, c, out)
        A = out
    return A


# -- Wick expansion -----------------------------------------------------------

def _rising(h: int, k: int) -> int:
    out = 1
    for j in range(k):
        out *= h + j
    return out


def _patterns(facsA, cA, xA, facsB, cB, xB):
    """Yield contraction patterns as tuples
    (const, pole, dA, dB, restA, restB, fermion_sign)."""
    nA, nB = len(facsA), len(facsB)
    suppA = set(_ysupport(cA))
    suppB = set(_ysupport(cB))

    def rec_b(j, usedB, state):
        if j == nB:
            yield state
            return
        const, pole, dA, dB, pairs, goneA, goneB = state
        yield from rec_b(j + 1, usedB, state)
        if j in usedB:
            return
        g = facsB[j]
        kind, label, s = g
        if kind == KIND_A and label in suppA:
            yield from rec_b(j + 1, usedB, (const * -math.factorial(s), pole + 1 + s, dA + (label,),
                                            dB, pairs, goneA, goneB | {j}))
        if kind in (KIND_MBOS, KIND_NBOS) and xA is not None:
            c = _bos_pair(g, xA)
            if c:
                yield from rec_b(j + 1, usedB, (const * -c * math.factorial(s), pole + 1 + s, dA, dB,
                                                pairs, goneA, goneB | {j}))

    def rec_a(i, usedB, state):
        if i == nA:
            yield from rec_b(0, usedB, state)
            return
        const, pole, dA, dB, pairs, goneA, goneB = state
        yield from rec_a(i + 1, usedB, state)
        g = facsA[i]
        kind, label, r = g
        for j in range(nB):
            if j in usedB:
                continue
            gB = facsB[j]
            prop = _PROPAGATORS.get((kind, gB[0]))
            if prop is None or gB[1] != label:
                continue
            h, c = prop
            s = gB[2]
            val = c * (-1) ** r * _rising(h, r + s)
            yield from rec_a(i + 1, usedB | {j}, (const * val, pole + h + r + s, dA, dB,
                                                  pairs + ((i, j),), goneA | {i}, goneB | {j}))
        if kind == KIND_A and label in suppB:
            yield from rec_a(i + 1, usedB, (const * (-1) ** r * math.factorial(r), pole + 1 + r, dA,
                                            dB + (label,), pairs, goneA | {i}, goneB))
        if kind in (KIND_MBOS, KIND_NBOS) and xB is not None:
            c = _bos_pair(g, xB)
            if c:
                yield from rec_a(i + 1, usedB, (const * c * (-1) ** r * math.factorial(r), pole + 1 + r,
                                                dA, dB, pairs, goneA | {i}, goneB))

    start = (Fraction(1), 0, (), (), (), frozenset(), frozenset())
    for const, pole, dA, dB, pairs, goneA, goneB in rec_a(0, frozenset(), start):
        restA = tuple(g for i, g in enumerate(facsA) if i not in goneA)
        restB = tuple(g for j, g in enumerate(facsB) if j not in goneB)
        # fermionic sign of moving each contracted pair together, in front
        order = []
        for i, j in pairs:
            order += [i, nA + j]
        order += [i for i in range(nA) if i not in goneA]
        order += [nA + j for j in range(nB) if j not in goneB]
        allf = facsA + facsB
        sign = _parity([p for p in order if allf[p][0] in FERMIONIC])
        yield const, pole, dA, dB, restA, restB, sign


def _diff_many(c, idx):
    for k in idx:
        c = _cdiff(c, k)
        if _czero(c):
            break
    return c


def _expand(A: Field, B: Field, max_power: int, pair_filter=None) -> dict:
    """Coefficients of (z-w)^p in A(z)B(w) for all p <= max_power."""
    out = {}
    for (facsA, xA), cA in A.terms.items():
        for (facsB, xB), cB in B.terms.items():
            if pair_filter is not None and not pair_filter(xA, xB):
                continue
            base = pair(xA, xB)
            if base.denominator != 1:
                raise OPEError("non-integral exponent: momenta are not lattice points")
            base = int(base)
            eps = cocycle(xA, xB)
            for const, pole, dA, dB, restA, restB, sign in _patterns(facsA, cA, xA, facsB, cB, xB):
                p0 = base - pole
                if p0 > max_power:
                    continue
                fA = _diff_many(cA, dA)
                fB = _diff_many(cB, dB)
                if _czero(fA) or _czero(fB):
                    continue
                scal = const * sign * eps
                Z = Field()
                Z.terms[(restA, xA)] = fA
                W_key, W_c = (restB, xB), fB
                for k in range(max_power - p0 + 1):
                    if k:
                        Z = derivative(Z)
                    if Z.is_zero():
                        break
                    bucket = out.setdefault(p0 + k, Field())
                    fk = scal / math.factorial(k)
                    for zk, zc in Z.terms.items():
                        prod = _mono_mul(zk, _cmul(zc, fk), W_key, W_c)
                        if prod is not None:
                            bucket._acc(*prod)
    return {p: f for p, f in out.items() if not f.is_zero()}


def _min_base_power(A: Field, B: Field, pair_filter=None):
    best = None
    for (facsA, xA), cA in A.terms.items():
        for (facsB, xB), cB in B.terms.items():
            if pair_filter is not None and not pair_filter(xA, xB):
                continue
            base = int(pair(xA, xB))
            for _, pole, *_rest in _patterns(facsA, cA, xA, facsB, cB, xB):
                p = base - pole
                best = p if best is None else min(best, p)
    return best


@dataclass
class LaurentOPE:
    """Singular part {-k: coefficient field at w}; `leading_exponent` is the
    lowest power of (z-w) with a nonzero coefficient (None if none was found
    within the search window), which may be positive for exponential pairs."""

    terms: dict = field(default_factory=dict)
    leading_exponent: int | None = None

    def is_zero(self) -> bool:
        return not self.terms

    def __getitem__(self, power):
        return self.terms.get(power, Field())

    def orders(self) -> list:
        return sorted(self.terms)

    def pretty(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"(z-w)^{p} [{pretty(f)}]" for p, f in sorted(self.terms.items()))

    def __repr__(self):
        return f"LaurentOPE({self.pretty()}; lead={self.leading_exponent})"


def _ope(A, B, pair_filter=None) -> LaurentOPE:
    A, B = as_field(A), as_field(B)
    sing = _expand(A, B, -1, pair_filter)
    if sing:
        lead = min(sing)
    else:
        lead = None
        if any(x is not None for x in A.momenta()) and any(x is not None for x in B.momenta()):
            pmin = _min_base_power(A, B, pair_filter)
            if pmin is not None:
                for p in range(max(pmin, 0), max(pmin, 0) + LEAD_SEARCH + 1):
                    if p in _expand(A, B, p, pair_filter):
                        lead = p
                        break
    return LaurentOPE(sing, lead)


def ope(A: Field, B: Field) -> LaurentOPE:
    """Singular part of A(z)B(w)."""
    return _ope(A, B)


def expansion(A: Field, B: Field, max_power: int) -> dict:
    """All coefficients of (z-w)^p, p <= max_power, in A(z)B(w)."""
    return _expand(as_field(A), as_field(B), max_power)


def residue_action(A: Field, B: Field) -> Field:
    """The (z-w)^{-1} coefficient of A(z)B(w), i.e. Res_z A(z) acting on B."""
    return _expand(as_field(A), as_field(B), -1).get(-1, Field())


def normal_product(A: Field, B: Field) -> Field:
    """The vertex-algebra normal ordered product (A_{(-1)}B): the (z-w)^0
    coefficient of A(z)B(w).  Nested products are right-nested by calling
    normal_product(A, normal_product(B, C))."""
    return _expand(as_field(A), as_field(B), 0).get(0, Field())


def _n_component(x):
    if x is None:
        return None
    return NPoint.from_coords(x[DIM:])


def _same_cone_filter(xA, xB) -> bool:
    nA, nB = _n_component(xA), _n_component(xB)
    for n in (nA, nB):
        if n is not None and not n.in_Kdual():
            raise OPEError(f"momentum N-component {n} lies outside K^v")
    if nA is None or nB is None or not any(nA.numerators) or not any(nB.numerators):
        return True
    return bool(argmin_set(nA) & argmin_set(nB))


def sigma_truncated_ope(A: Field, B: Field) -> LaurentOPE:
    """ope with products of exponentials whose N-components share no cone of
    the fan set to zero."""
    A, B = as_field(A), as_field(B)
    for x in A.momenta() | B.momenta():
        _same_cone_filter(x, None)
    return _ope(A, B, _same_cone_filter)


# -- L and J ------------------------------------------------------------------

def _coordinate_bos(kind, k, order=0):
    return _single(kind, k, order)


def virasoro_L() -> Field:
    """L = sum m_i^bos n_i^bos + sum (m_i^ferm)' n_i^ferm - ((deg^v)^bos)'.

    For the quintic, m_i = e_i and n_i = v_i are the coordinate vectors.
    """
    out = Field()
    for i in range(DIM):
        out = out + _single(KIND_MBOS, i) * _single(KIND_NBOS, i)
        out = out + _single(KIND_MFERM, i, 1) * _single(KIND_NFERM, i)
    degv = lattice_bos(n=(Fraction(1, DIM),) * DIM)
    return out - derivative(degv)


def current_J() -> Field:
    """J = sum m_i^ferm n_i^ferm + deg^bos - (deg^v)^bos."""
    out = Field()
    for i in range(DIM):
        out = out + _single(KIND_MFERM, i) * _single(KIND_NFERM, i)
    return out + lattice_bos(m=(1,) * DIM) - lattice_bos(n=(Fraction(1, DIM),) * DIM)


def zero_mode_weight(m=None, n=None) -> tuple:
    """(L_0, J_0) eigenvalues on e^{int (m,n)^bos}, read off from the engine.

    The closed forms are weight = m.n + m.deg^v and charge = deg.n - m.deg^v;
    only the declared L fixes the normalization, so for isotropic momenta there
    is no separate m^2/2 term to choose.
    """
    E = expo(m, n)
    if E.is_zero():
        return (0, 0)
    w = _expand(virasoro_L(), E, -1)
    j = _expand(current_J(), E, -1)
    weight = w.get(-2, Field()).coefficient_of(E) if -2 in w else Fraction(0)
    charge = j.get(-1, Field()).coefficient_of(E) if -1 in j else Fraction(0)
    if weight is None or charge is None:
        raise OPEError("exponential is not an eigenvector of the zero modes")
    if isinstance(weight, Fraction) and weight.denominator == 1:
        weight = int(weight)
    if isinstance(charge, Fraction) and charge.denominator == 1:
        charge = int(charge)
    return (weight, charge)


# -- printing -----------------------------------------------------------------

_SUP = {KIND_B: ("b^", ""), KIND_A: ("a_", ""), KIND_PHI: ("φ^", ""), KIND_PSI: ("ψ_", ""),
        KIND_MBOS: ("m_", "^bos"), KIND_NBOS: ("n_", "^bos"),
        KIND_MFERM: ("m_", "^ferm"), KIND_NFERM: ("n_", "^ferm")}


def _pretty_gen(g) -> str:
    kind, label, order = g
    pre, post = _SUP[kind]
    s = f"{pre}{label}{post}"
    if order == 0:
        return s
    if order <= 3:
        return f"({s})" + "'" * order
    return f"({s})^({order})"


def _fmt(c) -> str:
    if isinstance(c, Fraction):
        return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
    return str(c)


def _pretty_mom(x) -> str:
    m = ",".join(_fmt(c) for c in x[:DIM])
    n = ",".join(_fmt(c) for c in x[DIM:])
    return f"e^{{∫({m};{n})}}"


def pretty(A: Field) -> str:
    A = as_field(A)
    if A.is_zero():
        return "0"
    parts = []
    for (facs, x), c in sorted(A.terms.items(), key=lambda kv: (len(kv[0][0]), str(kv[0]))):
        body = [_pretty_gen(g) for g in facs]
        if x is not None:
            body.append(_pretty_mom(x))
        cs = _fmt(c)
        if not body:
            parts.append(cs)
        elif cs == "1":
            parts.append(" ".join(body))
        elif cs == "-1":
            parts.append("-" + " ".join(body))
        else:
            parts.append(f"({cs}) " + " ".join(body))
    return " + ".join(parts)
