"""Independent reference computations.

Nothing here uses the chiral-complex or rank code of the main engine: the
basis is enumerated by brute force over coordinate boxes, the differential is
assembled from Python dicts with Fraction entries, and ranks come from
sympy's exact row reduction (dense Gaussian elimination for small matrices).
"""
from __future__ import annotations

import itertools
from collections import defaultdict
from fractions import Fraction
from functools import lru_cache

from sympy import QQ
from sympy.polys.matrices.sdm import SDM

from .chiral import GradedDimTable
from .lattice import DEGV, DIM, VERTICES, NPoint
from .model import FivePolys, GParams

MAX_BASIS = 200_000
DENSE_LIMIT = 300


class OracleRefused(ValueError):
    pass


# -- linear algebra -----------------------------------------------------------

def dense_rank(rows) -> int:
    """Gaussian elimination over Q on a list of equal-length rows."""
    A = [[Fraction(x) for x in r] for r in rows]
    if not A:
        return 0
    ncols = len(A[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(A)) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        p = A[r][c]
        for i in range(r + 1, len(A)):
            if A[i][c] != 0:
                f = A[i][c] / p
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        r += 1
        if r == len(A):
            break
    return r


def dense_solve(A, b):
    """The unique solution of A x = b for square invertible A, or None."""
    n = len(A)
    M = [[Fraction(x) for x in row] + [Fraction(y)] for row, y in zip(A, b)]
    for c in range(n):
        piv = next((i for i in range(c, n) if M[i][c] != 0), None)
        if piv is None:
            return None
        M[c], M[piv] = M[piv], M[c]
        p = M[c][c]
        M[c] = [x / p for x in M[c]]
        for i in range(n):
            if i != c and M[i][c] != 0:
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[c])]
    return [M[i][n] for i in range(n)]


def _peel_singletons(entries: dict):
    """Strip rows and columns holding a single nonzero.

    Such an entry is a pivot that clears its row and column without touching
    anything else, so each one peeled adds exactly 1 to the rank.  Returns
    (rank peeled, remaining entries).
    """
    rows, cols = defaultdict(set), defaultdict(set)
    for (i, j), v in entries.items():
        if v:
            rows[i].add(j)
            cols[j].add(i)
    peeled = 0
    queue = [("c", j) for j in cols if len(cols[j]) == 1] + [("r", i) for i in rows if len(rows[i]) == 1]
    while queue:
        kind, x = queue.pop()
        if kind == "c":
            if len(cols.get(x, ())) != 1:
                continue
            (i,) = cols[x]
            j = x
        else:
            if len(rows.get(x, ())) != 1:
                continue
            (j,) = rows[x]
            i = x
        peeled += 1
        for jj in rows.pop(i):
            cols[jj].discard(i)
            if len(cols[jj]) == 1:
                queue.append(("c", jj))
        for ii in cols.pop(j):
            if ii in rows:
                rows[ii].discard(j)
                if len(rows[ii]) == 1:
                    queue.append(("r", ii))
    rest = {(i, j): entries[(i, j)] for i, js in rows.items() for j in js}
    return peeled, rest


def exact_rank(entries: dict, shape) -> int:
    """Rank of the rational matrix {(i, j): value}."""
    peeled, entries = _peel_singletons(entries)
    if not entries:
        return peeled
    # compact the surviving rows and columns
    ri = {i: k for k, i in enumerate(sorted({i for i, _ in entries}))}
    ci = {j: k for k, j in enumerate(sorted({j for _, j in entries}))}
    entries = {(ri[i], ci[j]): v for (i, j), v in entries.items()}
    return peeled + _reduced_rank(entries, (len(ri), len(ci)))


def _reduced_rank(entries: dict, shape) -> int:
    nrows, ncols = shape
    if min(nrows, ncols) <= DENSE_LIMIT and nrows * ncols <= DENSE_LIMIT * 4000:
        rows = [[0] * ncols for _ in range(nrows)]
        for (i, j), v in entries.items():
            rows[i][j] = v
        return dense_rank(rows)
    # sympy's sparse rref pivots on the first nonzero column of each row in
    # turn, so relabel sparsest columns first and feed sparsest rows first;
    # on these matrices that keeps fill and coefficient growth small
    sdm_rows = defaultdict(dict)
    col_count = defaultdict(int)
    for (i, j), v in entries.items():
        v = Fraction(v)
        sdm_rows[i][j] = QQ(v.numerator, v.denominator)
        col_count[j] += 1
    relabel = {j: k for k, j in enumerate(sorted(col_count, key=lambda j: (col_count[j], j)))}
    order = sorted(sdm_rows, key=lambda i: (len(sdm_rows[i]), i))
    M = {k: {relabel[j]: v for j, v in sdm_rows[i].items()} for k, i in enumerate(order)}
    return len(SDM(M, (nrows, ncols), QQ).rref()[1])


# -- the complex --------------------------------------------------------------

def _K(k):
    """a in Z^5_{>=0} with sum 5k (the M-points of K at height k)."""
    return [a for a in itertools.product(range(5 * k + 1), repeat=DIM) if sum(a) == 5 * k]


def _Kdual(l):
    """Numerator vectors of K^v at height l: nonnegative, mutually congruent
    mod 5, summing to 5l."""
    return [b for b in itertools.product(range(5 * l + 1), repeat=DIM)
            if sum(b) == 5 * l and len({x % 5 for x in b}) == 1]


@lru_cache(maxsize=8)
def oracle_basis(t: int) -> tuple:
    out = []
    for k in range(t + 1):
        duals = _Kdual(t - k)
        for a in _K(k):
            for b in duals:
                if sum(x * y for x, y in zip(a, b)) == 0:
                    for r in range(DIM + 1):
                        for S in itertools.combinations(range(DIM), r):
                            out.append((a, b, S))
    return tuple(out)


def _wedge(i, S):
    if i in S:
        return None, 0
    sign = (-1) ** sum(1 for j in S if j < i)
    return tuple(sorted(S + (i,))), sign


def _contract(i, S):
    if i not in S:
        return None, 0
    sign = (-1) ** S.index(i)
    return tuple(j for j in S if j != i), sign


def _apply(elem, F: FivePolys, g: GParams, ring: str):
    a, b, S = elem
    out = defaultdict(Fraction)
    for i, poly in enumerate(F):
        for m, c in poly.terms.items():
            na = tuple(x + y for x, y in zip(a, m))
            if sum(x * y for x, y in zip(na, b)):
                continue
            nS, sign = _wedge(i, S) if ring == "A" else _contract(i, S)
            if sign:
                out[(na, b, nS)] += sign * c
    for n, c in g.items():
        nb = tuple(x + y for x, y in zip(b, n.numerators))
        if sum(x * y for x, y in zip(a, nb)):
            continue
        for j in range(DIM):
            comp = Fraction(n.numerators[j], 5)
            if not comp:
                continue
            nS, sign = _contract(j, S) if ring == "A" else _wedge(j, S)
            if sign:
                out[(a, nb, nS)] += sign * comp * c
    return {k: v for k, v in out.items() if v}


def oracle_differential(t: int, F: FivePolys, g: GParams, ring: str = "A"):
    """(entries {(row, col): Fraction}, shape) of d_t in the oracle's bases."""
    src, tgt = oracle_basis(t), oracle_basis(t + 1)
    index = {e: i for i, e in enumerate(tgt)}
    entries = {}
    for j, e in enumerate(src):
        for key, v in _apply(e, F, g, ring).items():
            entries[(index[key], j)] = v
    return entries, (len(tgt), len(src))


def _guard(t_max):
    for t in range(t_max + 1):
        n = len(oracle_basis(t)) if t <= 3 else MAX_BASIS + 1
        if n > MAX_BASIS:
            raise OracleRefused(f"C_{t} would have more than {MAX_BASIS} basis elements")


def dense_cohomology_dims(F: FivePolys, g: GParams, ring: str = "A", t_max: int = 3) -> GradedDimTable:
    """Same contract as chiral.cohomology_dims.

    Ranks are taken on the restriction of d_t to each w-class of its source;
    every entry is checked to stay inside its class, so d_t is block diagonal
    and the block ranks add up to its rank.
    """
    if t_max < 2:
        raise ValueError("t_max must be at least 2")
    if ring not in ("A", "B"):
        raise ValueError(f"ring must be A or B, got {ring!r}")
    _guard(t_max)
    bases = [oracle_basis(t) for t in range(t_max + 1)]

    def wlabel(t, e):
        a, b, S = e
        k = sum(a) // 5
        l = t - k
        return k - len(S) - l if ring == "A" else l - len(S) - k

    ranks = defaultdict(int)
    for t in range(t_max):
        entries, shape = oracle_differential(t, F, g, ring)
        groups = defaultdict(dict)
        for (i, j), v in entries.items():
            ws, wt = wlabel(t, bases[t][j]), wlabel(t + 1, bases[t + 1][i])
            if ws != wt:
                raise AssertionError("differential mixes w-classes")
            groups[ws][(i, j)] = v
        for w, ent in groups.items():
            ranks[(t, w)] = exact_rank(ent, shape)
    table = GradedDimTable(ring, t_max)
    for t in range(t_max):
        counts = defaultdict(int)
        for e in bases[t]:
            counts[wlabel(t, e)] += 1
        for w, c in counts.items():
            table.dims[(t, w)] = c - ranks[(t, w)] - (ranks[(t - 1, w)] if t else 0)
    for w in sorted({w for _, w in table.dims}):
        top = [table.dims.get((t, w)) for t in (t_max - 1, t_max - 2)]
        table.stabilized[w] = None not in top and all(d == 0 for d in top)
    return table


def dense_total_dims(F: FivePolys, g: GParams, ring: str = "A", t_max: int = 3) -> dict:
    """{t: dim H^t} from whole-matrix ranks."""
    _guard(t_max)
    ranks = {}
    for t in range(t_max):
        entries, shape = oracle_differential(t, F, g, ring)
        ranks[t] = exact_rank(entries, shape)
    return {t: len(oracle_basis(t)) - ranks[t] - (ranks[t - 1] if t else 0)
            for t in range(t_max)}


def d_squared_is_zero(F: FivePolys, g: GParams, ring: str = "A", t: int = 0) -> bool:
    src = oracle_basis(t)
    for e in src:
        acc = defaultdict(Fraction)
        for e1, v1 in _apply(e, F, g, ring).items():
            for e2, v2 in _apply(e1, F, g, ring).items():
                acc[e2] += v1 * v2
        if any(acc.values()):
            return False
    return True


# -- Jacobian ring ------------------------------------------------------------

class JacobianReport(dict):
    """{degree: dim of C[x]_d / (R^0..R^4)_d}."""

    def to_json(self) -> dict:
        return {"dims": [{"d": d, "dim": v} for d, v in sorted(self.items())]}


def _monomials(d):
    return [e for e in itertools.product(range(d + 1), repeat=DIM) if sum(e) == d]


def jacobian_dims(R, d_max: int) -> JacobianReport:
    """Graded dimensions of C[x_0..x_4] / <R^0, ..., R^4> for d = 0..d_max.

    R: five homogeneous quartics given as {exponent tuple: coefficient}.
    """
    R = [dict(getattr(p, "terms", p)) for p in R]
    for p in R:
        if any(sum(e) != 4 for e in p):
            raise ValueError("R^i must be homogeneous of degree 4")
    out = JacobianReport()
    for d in range(d_max + 1):
        target = _monomials(d)
        if d < 4:
            out[d] = len(target)
            continue
        index = {e: i for i, e in enumerate(target)}
        entries = {}
        col = 0
        for p in R:
            for mono in _monomials(d - 4):
                for e, c in p.items():
                    key = (index[tuple(x + y for x, y in zip(mono, e))], col)
                    entries[key] = entries.get(key, 0) + Fraction(c)
                col += 1
        entries = {k: v for k, v in entries.items() if v}
        out[d] = len(target) - exact_rank(entries, (len(target), col))
    return out


def fermat_R() -> list:
    return [{tuple(4 if j == i else 0 for j in range(DIM)): 5} for i in range(DIM)]


def perturbed_R(eps=1) -> list:
    """R^i = 5 x_i^4 + eps x_{i+1}^4."""
    out = []
    for i in range(DIM):
        p = {tuple(4 if j == i else 0 for j in range(DIM)): Fraction(5)}
        p[tuple(4 if j == (i + 1) % DIM else 0 for j in range(DIM))] = Fraction(eps)
        out.append(p)
    return out


# -- cone membership ----------------------------------------------------------

def cone_membership(n: NPoint, i: int) -> bool:
    """Is n in the maximal cone spanned by deg^v, -deg^v and v_j (j != i)?

    Those five generators other than -deg^v form a basis of N_Q, so
    n = lam deg^v + sum mu_j v_j has a unique solution with lam free (the pair
    +-deg^v absorbs its sign); membership is mu_j >= 0.
    """
    gens = [DEGV.coords] + [VERTICES[j].coords for j in range(DIM) if j != i]
    A = [[gens[c][r] for c in range(DIM)] for r in range(DIM)]
    sol = dense_solve(A, n.coords)
    if sol is None:
        raise AssertionError("cone generators are not a basis")
    return all(mu >= 0 for mu in sol[1:])


@lru_cache(maxsize=None)
def cones_containing(n: NPoint) -> frozenset:
    return frozenset(i for i in range(DIM) if cone_membership(n, i))


def feasible_same_cone(n1: NPoint, n2: NPoint) -> bool:
    return bool(cones_containing(n1) & cones_containing(n2))
