"""The chiral-ring complexes C[(K + K^v)_0] (x) Lambda^* M (A-ring) and
(x) Lambda^* N (B-ring) and their cohomology.

A basis vector is [a, b] (x) e_S with a in K, b in K^v, a.b = 0 and S a subset
of {0..4} (stored as a 5-bit mask).  For the A-ring e_S is the wedge of the
m_i, i in S; for the B-ring it is the wedge of the v_i.  The A-ring
differential is

    d = sum F^i_m [m] (x) (m_i ^ -)  +  sum g_n [n] (x) iota_n,

and the B-ring one swaps wedges and contractions.  Products landing on a pair
with positive pairing are zero in the quotient ring.

Gradings.  With a in k*Delta and b in l*Delta^v put t = k + l.  Every term of
d raises t by one, because m.deg^v = 1 for m in Delta and deg.n = 1 for n in
Delta^v.  In the A-ring an F-term raises k and |S| by one and a g-term raises
l by one and lowers |S| by one, so w = k - |S| - l is preserved; in the B-ring
the roles of the wedge and contraction swap and w = l - |S| - k is preserved.
So each C_t splits into finite w-blocks and d_t is block diagonal.
"""
from __future__ import annotations

import json
import math
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .lattice import DIM, MPoint, NPoint, graded_K_array, graded_Kdual_array
from .linalg import rank_of_columns
from .model import FivePolys, GParams

RINGS = ("A", "B")
NMASK = 1 << DIM
T_CAP = 10
# One radix for every piece (digits of a, b numerators never exceed 5*T_CAP),
# so the key of a product is the key of the factor plus a fixed offset.
RADIX = DIM * T_CAP + 1
POPCOUNT = np.array([bin(s).count("1") for s in range(NMASK)], dtype=np.int64)
# (-1)^{#{j in S : j < i}}
SIGN = np.array([[(-1) ** bin(s & ((1 << i) - 1)).count("1") for i in range(DIM)]
                 for s in range(NMASK)], dtype=np.int64)
_PLACES = np.array([RADIX ** (2 * DIM - 3 - c) * NMASK for c in range(2 * DIM - 2)],
                   dtype=np.int64)
_K_PLACE = RADIX ** (2 * DIM - 2) * NMASK
assert (T_CAP + 1) * _K_PLACE < 2 ** 62


@dataclass(frozen=True)
class ChiralBasisElement:
    a: MPoint
    b: NPoint
    S: frozenset


def _encode(k, a, b, S) -> np.ndarray:
    """Key (k, a_0..a_3, b_0..b_3, S) in mixed radix; a_4, b_4 are implied."""
    ab = np.concatenate([a[:, :DIM - 1], b[:, :DIM - 1]], axis=1)
    return np.asarray(k, dtype=np.int64) * _K_PLACE + ab @ _PLACES + S


def _offset(m=None, n=None) -> int:
    """Key shift produced by multiplying with [m] or [n]."""
    out = 0
    if m is not None:
        out += _K_PLACE + int(np.dot(m[:DIM - 1], _PLACES[:DIM - 1]))
    if n is not None:
        out += int(np.dot(n[:DIM - 1], _PLACES[DIM - 1:]))
    return out


def _support_bits(arr: np.ndarray) -> np.ndarray:
    return (arr > 0).astype(np.int64) @ (1 << np.arange(DIM, dtype=np.int64))


class GradedPiece:
    """C_t as parallel arrays a (N,5), b (N,5 numerators), S (N,), k (N,),
    sorted lexicographically in (k, a, b, S)."""

    def __init__(self, t: int):
        if t < 0:
            raise ValueError("t must be nonnegative")
        if t > T_CAP:
            raise ValueError(f"t = {t} exceeds the supported maximum {T_CAP}")
        self.t = t
        As, Bs, Ks = [], [], []
        for k in range(t + 1):
            A = graded_K_array(k)
            B = graded_Kdual_array(t - k)
            ok = ((A > 0).astype(np.int32) @ (B > 0).astype(np.int32).T) == 0
            ia, ib = np.nonzero(ok)
            As.append(A[ia])
            Bs.append(B[ib])
            Ks.append(np.full(len(ia), k, dtype=np.int64))
        a = np.concatenate(As)
        b = np.concatenate(Bs)
        k = np.concatenate(Ks)
        pair_keys = _encode(k, a, b, np.zeros(len(k), dtype=np.int64))
        order = np.argsort(pair_keys, kind="stable")
        a, b, k, pair_keys = a[order], b[order], k[order], pair_keys[order]
        n = len(k)
        self.a = np.repeat(a, NMASK, axis=0)
        self.b = np.repeat(b, NMASK, axis=0)
        self.k = np.repeat(k, NMASK)
        self.S = np.tile(np.arange(NMASK, dtype=np.int64), n)
        self.keys = np.repeat(pair_keys, NMASK) + self.S
        self.supp_a = np.repeat(_support_bits(a), NMASK)
        self.supp_b = np.repeat(_support_bits(b), NMASK)

    def __len__(self):
        return len(self.S)

    @property
    def l(self) -> np.ndarray:
        return self.t - self.k

    def w(self, ring: str) -> np.ndarray:
        if ring == "A":
            return self.k - POPCOUNT[self.S] - self.l
        if ring == "B":
            return self.l - POPCOUNT[self.S] - self.k
        raise ValueError(f"ring must be A or B, got {ring!r}")

    def element(self, i: int) -> ChiralBasisElement:
        return ChiralBasisElement(MPoint(tuple(int(x) for x in self.a[i])),
                                  NPoint(tuple(int(x) for x in self.b[i])),
                                  frozenset(j for j in range(DIM) if self.S[i] >> j & 1))

    def elements(self):
        return [self.element(i) for i in range(len(self))]

    def index(self, a, b, S) -> int:
        """Position of ([a, b], e_S) in the piece."""
        a = np.array([a.coords if isinstance(a, MPoint) else a], dtype=np.int64)
        b = np.array([b.numerators if isinstance(b, NPoint) else b], dtype=np.int64)
        mask = sum(1 << j for j in S)
        key = _encode(np.array([int(a.sum()) // DIM]), a, b, np.array([mask]))[0]
        pos = int(np.searchsorted(self.keys, key))
        if pos >= len(self.keys) or self.keys[pos] != key:
            raise KeyError("not a basis element of this piece")
        return pos


@lru_cache(maxsize=T_CAP + 2)
def _piece(t: int) -> GradedPiece:
    return GradedPiece(t)


def basis_t(t: int, ring: str = "A") -> GradedPiece:
    """C_t.  The index set is the same for both rings; only the meaning of S
    (wedges of m_i or of v_i) differs."""
    if ring not in RINGS:
        raise ValueError(f"ring must be A or B, got {ring!r}")
    return _piece(t)


def basis_size(t: int) -> int:
    return len(_piece(t))


# -- the differential ---------------------------------------------------------

def _terms(F: FivePolys, g: GParams):
    """(F-terms, g-terms, scale) with integer values = scale * true value.

    F-terms: (i, m coords, value); g-terms: (n numerators, j, value) for the
    component c_j = num_j / 5 of n in the v-basis.
    """
    fterms, gterms, dens = [], [], [1]
    for i, p in enumerate(F):
        for e, c in sorted(p.terms.items()):
            fterms.append((i, np.array(e, dtype=np.int64), c))
            dens.append(c.denominator)
    for n, c in g.items():
        if not c:
            continue
        for j, num in enumerate(n.numerators):
            if num:
                v = c * Fraction(num, DIM)
                gterms.append((np.array(n.numerators, dtype=np.int64), j, v))
                dens.append(v.denominator)
    scale = math.lcm(*dens)
    fterms = [(i, m, int(c * scale)) for i, m, c in fterms]
    gterms = [(n, j, int(v * scale)) for n, j, v in gterms]
    return fterms, gterms, scale


@dataclass
class ScaledMatrix:
    """The rational matrix `matrix / scale` (matrix: integer scipy CSC)."""

    matrix: sp.csc_matrix
    scale: int

    @property
    def shape(self):
        return self.matrix.shape

    def entry(self, i, j) -> Fraction:
        return Fraction(int(self.matrix[i, j]), self.scale)

    def to_dict(self) -> dict:
        coo = self.matrix.tocoo()
        return {(int(i), int(j)): Fraction(int(v), self.scale)
                for i, j, v in zip(coo.row, coo.col, coo.data) if v}


def differential_matrix(t: int, F: FivePolys, g: GParams, ring: str = "A") -> ScaledMatrix:
    """d_t : C_t -> C_{t+1} on the lexicographic bases."""
    if ring not in RINGS:
        raise ValueError(f"ring must be A or B, got {ring!r}")
    src, tgt = basis_t(t), basis_t(t + 1)
    fterms, gterms, scale = _terms(F, g)
    S = src.S
    rows, cols, vals = [], [], []

    def emit(sel, shift, val):
        idx = np.nonzero(sel)[0]
        if not len(idx):
            return
        ks = src.keys[idx] + shift
        pos = np.searchsorted(tgt.keys, ks)
        if (pos >= len(tgt.keys)).any() or (tgt.keys[pos] != ks).any():
            raise AssertionError("differential left the basis of C_{t+1}")
        rows.append(pos)
        cols.append(idx)
        vals.append(val[idx])

    wedge_A = ring == "A"
    # [a] * [m] survives iff supp(m) misses supp(b); wedge needs i not in S,
    # contraction needs i in S
    for i, m, c in fterms:
        bit = 1 << i
        has = (S & bit) != 0
        sel = ((src.supp_b & int(_support_bits(m[None])[0])) == 0) & (~has if wedge_A else has)
        emit(sel, _offset(m=m) + (bit if wedge_A else -bit), c * SIGN[S, i])
    for n, j, v in gterms:
        bit = 1 << j
        has = (S & bit) != 0
        sel = ((src.supp_a & int(_support_bits(n[None])[0])) == 0) & (has if wedge_A else ~has)
        emit(sel, _offset(n=n) + (-bit if wedge_A else bit), v * SIGN[S, j])
    if rows:
        r, c_, v = np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)
    else:
        r = c_ = v = np.zeros(0, dtype=np.int64)
    if (src.w(ring)[c_] != tgt.w(ring)[r]).any():
        raise AssertionError("differential does not preserve w")
    M = sp.csc_matrix((v, (r, c_)), shape=(len(tgt), len(src)), dtype=np.int64)
    M.sum_duplicates()
    M.eliminate_zeros()
    return ScaledMatrix(M, scale)


def _product_nonzeros(A: sp.csc_matrix, B: sp.csc_matrix) -> int:
    """nnz of A @ B, exact; falls back to Python integers if int64 could overflow."""
    amax = int(abs(A).max()) if A.nnz else 0
    bmax = int(abs(B).max()) if B.nnz else 0
    inner = int(np.diff(sp.csr_matrix(A).indptr).max(initial=1))
    if amax * bmax * max(inner, 1) < 2 ** 62:
        P = sp.csc_matrix(A @ B)
        P.eliminate_zeros()
        return int(P.nnz)
    A = sp.csc_matrix(A)
    count = 0
    for j in range(B.shape[1]):
        acc = defaultdict(int)
        for kk, bv in zip(B.indices[B.indptr[j]:B.indptr[j + 1]].tolist(),
                          B.data[B.indptr[j]:B.indptr[j + 1]].tolist()):
            lo, hi = A.indptr[kk], A.indptr[kk + 1]
            for i, av in zip(A.indices[lo:hi].tolist(), A.data[lo:hi].tolist()):
                acc[i] += int(av) * int(bv)
        count += sum(1 for x in acc.values() if x)
    return count


def d_squared_nonzeros(t: int, F: FivePolys, g: GParams, ring: str = "A") -> int:
    """Number of nonzero entries of d_{t+1} d_t (exact)."""
    return _product_nonzeros(differential_matrix(t + 1, F, g, ring).matrix,
                             differential_matrix(t, F, g, ring).matrix)


def d_squared_report(F: FivePolys, g: GParams, ring: str = "A", t_top: int = 5) -> dict:
    """{t: nnz(d_{t+1} d_t)} for t = 0..t_top, building each d_t once."""
    out = {}
    prev = differential_matrix(0, F, g, ring).matrix
    for t in range(t_top + 1):
        nxt = differential_matrix(t + 1, F, g, ring).matrix
        out[t] = _product_nonzeros(nxt, prev)
        prev = nxt
    return out


# -- cohomology ---------------------------------------------------------------

@dataclass
class GradedDimTable:
    ring: str
    t_max: int
    dims: dict = field(default_factory=dict)          # (t, w) -> dim H
    stabilized: dict = field(default_factory=dict)    # w -> bool

    def totals(self) -> dict:
        out = defaultdict(int)
        for (t, _), d in self.dims.items():
            out[t] += d
        return {t: out[t] for t in sorted(out)}

    def to_json(self) -> dict:
        return {
            "ring": self.ring,
            "t_max": self.t_max,
            "dims": [{"t": t, "w": w, "dim": d} for (t, w), d in sorted(self.dims.items())],
            "totals": [{"t": t, "dim": d} for t, d in self.totals().items()],
            "stabilized": [{"w": w, "stabilized": s} for w, s in sorted(self.stabilized.items())],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True) + "\n"

    def to_tsv(self) -> str:
        lines = ["t\tw\tdim"]
        lines += [f"{t}\t{w}\t{d}" for (t, w), d in sorted(self.dims.items())]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_json(cls, data: dict) -> "GradedDimTable":
        return cls(data["ring"], data["t_max"],
                   {(e["t"], e["w"]): e["dim"] for e in data["dims"]},
                   {e["w"]: e["stabilized"] for e in data.get("stabilized", [])})

    def __eq__(self, other):
        return (isinstance(other, GradedDimTable) and self.ring == other.ring
                and self.t_max == other.t_max and self.dims == other.dims)


def _block_columns(M: sp.csc_matrix, wsrc: np.ndarray) -> dict:
    """Columns of M grouped by the w-label of their source."""
    out = defaultdict(list)
    indptr, indices, data = M.indptr, M.indices, M.data
    for j in range(M.shape[1]):
        lo, hi = indptr[j], indptr[j + 1]
        if hi > lo:
            out[int(wsrc[j])].append(dict(zip(indices[lo:hi].tolist(), data[lo:hi].tolist())))
    return out


def differential_ranks(t: int, F, g, ring: str, threads: int = 1, blocked: bool = True) -> dict:
    """{w: rank of d_t on the w-block} (key None when unblocked)."""
    D = differential_matrix(t, F, g, ring).matrix
    if not blocked:
        return {None: rank_of_columns(_block_columns(D, np.zeros(D.shape[1], dtype=np.int64))[0])}
    blocks = _block_columns(D, basis_t(t).w(ring))
    keys = sorted(blocks)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            ranks = list(ex.map(lambda w: rank_of_columns(blocks[w]), keys))
    else:
        ranks = [rank_of_columns(blocks[w]) for w in keys]
    return dict(zip(keys, ranks))


def cohomology_dims(F: FivePolys, g: GParams, ring: str = "A", t_max: int = 4,
                    threads: int = 1) -> GradedDimTable:
    """dim H^t_w for t <= t_max - 1 (d_{t_max} is never built)."""
    if t_max < 2:
        raise ValueError("t_max must be at least 2")
    if ring not in RINGS:
        raise ValueError(f"ring must be A or B, got {ring!r}")
    ranks = {t: differential_ranks(t, F, g, ring, threads) for t in range(t_max)}
    table = GradedDimTable(ring, t_max)
    for t in range(t_max):
        ws, counts = np.unique(basis_t(t).w(ring), return_counts=True)
        for w, c in zip(ws.tolist(), counts.tolist()):
            dim = c - ranks[t].get(w, 0) - (ranks[t - 1].get(w, 0) if t else 0)
            table.dims[(t, w)] = dim
    for w in sorted({w for _, w in table.dims}):
        top = [table.dims.get((t, w)) for t in (t_max - 1, t_max - 2)]
        table.stabilized[w] = all(d == 0 for d in top if d is not None) and None not in top
    return table


def unblocked_dims(F, g, ring: str, t_max: int) -> dict:
    """{t: dim H^t} from unblocked ranks (for checking block additivity)."""
    ranks = [differential_ranks(t, F, g, ring, blocked=False)[None] for t in range(t_max)]
    return {t: basis_size(t) - ranks[t] - (ranks[t - 1] if t else 0) for t in range(t_max)}
