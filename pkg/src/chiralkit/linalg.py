"""Exact rank of sparse integer matrices.

Fraction-free elimination: a column is reduced against stored pivot columns
by cross-multiplication (a*r - b*p with a, b the pivot-row entries divided by
their gcd), then divided by the gcd of its entries.  Keeping every stored
vector primitive bounds entry growth well enough for the Koszul-type
matrices built here, whose entries are small and whose columns have a
handful of nonzeros.

Pivot choice is static: rows are ordered once by how many columns touch them
(fewest first), and a column's pivot is its first row in that order.  On
these matrices that ordering keeps fill low; a dynamic Markowitz search was
measured to be slower because of its bookkeeping.
"""
from __future__ import annotations

import math
from collections import Counter

import numpy as np
import scipy.sparse as sp


def _primitive(r: dict) -> dict:
    g = 0
    for v in r.values():
        g = math.gcd(g, v)
        if g == 1:
            return r
    if g > 1:
        return {k: v // g for k, v in r.items()}
    return r


def rank_of_columns(columns) -> int:
    """Rank of the matrix whose columns are dicts {row: nonzero int}."""
    cols = [c for c in columns if c]
    if not cols:
        return 0
    count = Counter()
    for c in cols:
        count.update(c.keys())
    order = {k: (n, k) for k, n in count.items()}
    key = order.__getitem__
    pivots = {}
    for c in sorted(cols, key=len):
        r = _primitive(dict(c))
        while r:
            p_row = min(r, key=key)
            p = pivots.get(p_row)
            if p is None:
                pivots[p_row] = r
                break
            a, b = r[p_row], p[p_row]
            g = math.gcd(a, b)
            a //= g
            b //= g
            if b != 1:
                new = {k: v * b for k, v in r.items()}
            else:
                new = dict(r)
            for k, v in p.items():
                x = new.get(k, 0) - a * v
                if x:
                    new[k] = x
                else:
                    new.pop(k, None)
            r = _primitive(new)
    return len(pivots)


def columns_of(matrix) -> list:
    """Column dicts of a scipy sparse or dense integer matrix."""
    if not sp.issparse(matrix):
        matrix = sp.csc_matrix(np.asarray(matrix))
    m = sp.csc_matrix(matrix)
    m.sum_duplicates()
    out = []
    for j in range(m.shape[1]):
        lo, hi = m.indptr[j], m.indptr[j + 1]
        out.append({int(i): int(v) for i, v in zip(m.indices[lo:hi], m.data[lo:hi]) if v})
    return out


def rank(matrix) -> int:
    """Exact rank of an integer matrix (scipy sparse, numpy, or nested lists)."""
    return rank_of_columns(columns_of(matrix))
