"""Dual lattices of the quintic: M, N, the cones K and K^v, and the fan.

M is the index-5 sublattice of Z^5 of vectors with coordinate sum divisible
by 5.  N = Z^5 + Z(1/5, ..., 1/5) is stored through integer numerators (the
actual coordinates are numerators / 5), so every computation here stays in
the integers except where the rational dual basis of M_Q is involved.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

DIM = 5


def _compositions(total: int, parts: int):
    """All tuples of `parts` nonnegative ints summing to `total`, lex order."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@dataclass(frozen=True, order=True)
class MPoint:
    coords: tuple

    def __post_init__(self):
        coords = tuple(int(c) for c in self.coords)
        object.__setattr__(self, "coords", coords)
        if sum(coords) % DIM:
            raise ValueError(f"{coords} is not in M: coordinate sum not divisible by {DIM}")

    def __add__(self, other):
        return MPoint(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __neg__(self):
        return MPoint(tuple(-a for a in self.coords))

    @property
    def degree(self) -> int:
        """Pairing with deg^v, i.e. the k with self in k*Delta when self is in K."""
        return sum(self.coords) // DIM

    def in_K(self) -> bool:
        return all(c >= 0 for c in self.coords)

    def __repr__(self):
        return f"MPoint{self.coords}"


@dataclass(frozen=True, order=True)
class NPoint:
    numerators: tuple

    def __post_init__(self):
        nums = tuple(int(c) for c in self.numerators)
        object.__setattr__(self, "numerators", nums)
        if len({c % DIM for c in nums}) > 1:
            raise ValueError(f"numerators {nums} do not define a point of N")

    @classmethod
    def from_coords(cls, coords) -> "NPoint":
        nums = []
        for c in coords:
            c = Fraction(c) * DIM
            if c.denominator != 1:
                raise ValueError(f"{coords} is not in N")
            nums.append(int(c))
        return cls(tuple(nums))

    @property
    def coords(self) -> tuple:
        return tuple(Fraction(c, DIM) for c in self.numerators)

    def __add__(self, other):
        return NPoint(tuple(a + b for a, b in zip(self.numerators, other.numerators)))

    def __neg__(self):
        return NPoint(tuple(-a for a in self.numerators))

    @property
    def degree(self) -> int:
        """Pairing with deg = (1,...,1)."""
        return sum(self.numerators) // DIM

    def in_Kdual(self) -> bool:
        return all(c >= 0 for c in self.numerators)

    def __repr__(self):
        return "NPoint(" + ", ".join(str(c) for c in self.coords) + ")"


@dataclass(frozen=True)
class MQPoint:
    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(Fraction(c) for c in self.coords))

    def __repr__(self):
        return "MQPoint(" + ", ".join(str(c) for c in self.coords) + ")"


def pairing(m, n: NPoint) -> Fraction:
    """Dot product of a point of M (or M_Q) with a point of N."""
    if isinstance(m, MPoint):
        total = sum(a * b for a, b in zip(m.coords, n.numerators))
        return Fraction(total, DIM)
    return sum((a * b for a, b in zip(m.coords, n.coords)), Fraction(0))


@dataclass(frozen=True)
class LatticeEnv:
    deg: MPoint
    degv: NPoint
    vertices: tuple  # v_0..v_4, vertices of Delta^v
    dual_basis: tuple  # m_0..m_4 in M_Q with m_i . v_j = delta_ij

    def __post_init__(self):
        if pairing(self.deg, self.degv) != 1:
            raise ValueError("deg . deg^v must be 1")
        for i, m in enumerate(self.dual_basis):
            for j, v in enumerate(self.vertices):
                if pairing(m, v) != (i == j):
                    raise ValueError("dual basis is not dual to the vertices")
        for v in self.vertices + (self.degv,):
            if not v.in_Kdual() or pairing(self.deg, v) != 1:
                raise ValueError(f"{v} is not a point of Delta^v")


def _quintic_env() -> LatticeEnv:
    eye = [tuple(int(i == j) for j in range(DIM)) for i in range(DIM)]
    return LatticeEnv(
        deg=MPoint((1,) * DIM),
        degv=NPoint((1,) * DIM),
        vertices=tuple(NPoint(tuple(DIM * c for c in row)) for row in eye),
        dual_basis=tuple(MQPoint(row) for row in eye),
    )


QUINTIC = _quintic_env()
DEG = QUINTIC.deg
DEGV = QUINTIC.degv
VERTICES = QUINTIC.vertices
DUAL_BASIS = QUINTIC.dual_basis


@lru_cache(maxsize=None)
def _graded_K(k: int) -> tuple:
    return tuple(MPoint(c) for c in _compositions(DIM * k, DIM))


def enum_graded_K(k: int) -> list:
    """Lattice points of K at height k (the dilate k*Delta), lexicographic."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    return list(_graded_K(k))


@lru_cache(maxsize=None)
def _graded_Kdual(l: int) -> tuple:
    # numerators are all congruent to some r mod 5 and sum to 5*l
    out = [nums for nums in _compositions(DIM * l, DIM) if len({c % DIM for c in nums}) == 1]
    return tuple(NPoint(nums) for nums in out)


def enum_graded_Kdual(l: int) -> list:
    """Points b of K^v with deg . b = l, lexicographic in the numerators."""
    if l < 0:
        raise ValueError("l must be nonnegative")
    return list(_graded_Kdual(l))


@lru_cache(maxsize=None)
def graded_K_array(k: int) -> np.ndarray:
    """enum_graded_K(k) as an (N, 5) int64 array in the same order."""
    pts = _graded_K(k)
    return np.array([p.coords for p in pts], dtype=np.int64).reshape(len(pts), DIM)


@lru_cache(maxsize=None)
def graded_Kdual_array(l: int) -> np.ndarray:
    """enum_graded_Kdual(l) as an (N, 5) int64 array of numerators."""
    pts = _graded_Kdual(l)
    return np.array([p.numerators for p in pts], dtype=np.int64).reshape(len(pts), DIM)


def delta_points() -> list:
    return enum_graded_K(1)


def delta_dual_points() -> list:
    return enum_graded_Kdual(1)


def argmin_set(n: NPoint) -> frozenset:
    low = min(n.numerators)
    return frozenset(i for i, c in enumerate(n.numerators) if c == low)


def same_cone(n1: NPoint, n2: NPoint) -> bool:
    """True iff some maximal cone of the fan contains both points of K^v.

    The maximal cone sigma_i is spanned by deg^v, -deg^v and the vertices v_j,
    j != i.  Writing n = lam*deg^v + sum_{j != i} mu_j v_j gives n_i = lam/5 and
    n_j = lam/5 + mu_j, so n lies in sigma_i exactly when n_i is a minimal
    coordinate of n.  Two points share a cone iff their argmin sets meet.
    """
    for n in (n1, n2):
        if not n.in_Kdual():
            raise ValueError(f"{n} is outside K^v")
    return bool(argmin_set(n1) & argmin_set(n2))


def cone_indices(n: NPoint) -> frozenset:
    """Indices i of the maximal cones sigma_i containing n."""
    return argmin_set(n)


def duality_table() -> list:
    """The 5x5 table m_i . v_j."""
    return [[pairing(m, v) for v in VERTICES] for m in DUAL_BASIS]


def lattice_info() -> dict:
    return {
        "deg": list(DEG.coords),
        "degv": [str(c) for c in DEGV.coords],
        "counts_K": {k: len(enum_graded_K(k)) for k in range(4)},
        "counts_Kdual": {l: len(enum_graded_Kdual(l)) for l in range(4)},
        "duality": [[str(x) for x in row] for row in duality_table()],
    }
