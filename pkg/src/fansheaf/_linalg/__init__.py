"""Exact linear algebra layer.

Integer kernels (rref/rank/nullspace/solve) come in two interchangeable
implementations: a compiled Cython extension and a pure-Python fallback.
The compiled one is used when importable; setting FANSHEAF_PURE=1 in the
environment forces the fallback (the benchmark and parity tests use this).

The wrappers below accept matrices with Fraction or int entries.  Rows
are scaled to integers first; row scaling changes neither row space,
rank, kernel, nor solution sets (solutions are returned as Fractions).
"""

import os
from fractions import Fraction
from math import gcd

from . import pure as _pure

if os.environ.get("FANSHEAF_PURE"):
    _impl = _pure
    KERNEL = "pure"
else:
    try:
        from . import _fastrref as _impl

        KERNEL = "compiled"
    except ImportError:
        _impl = _pure
        KERNEL = "pure"

rref_int = _impl.rref_int
rank_int = _impl.rank_int
nullspace_int = _impl.nullspace_int
solve_int = _impl.solve_int


def scale_rows_to_int(rows):
    """Clear denominators row by row; returns a list of int lists."""
    out = []
    for row in rows:
        den = 1
        for a in row:
            if isinstance(a, Fraction):
                d = a.denominator
                den = den * d // gcd(den, d)
        if den == 1:
            out.append([int(a) for a in row])
        else:
            out.append([int(a * den) for a in row])
    return out


def rref(rows):
    """Canonical primitive-integer RREF rows and pivot columns."""
    return rref_int(scale_rows_to_int(rows))


def rank(rows):
    return rank_int(scale_rows_to_int(rows))


def nullspace(rows, ncols):
    """Primitive integer basis of {x : rows @ x = 0}."""
    return nullspace_int(scale_rows_to_int(rows), ncols)


def solve(rows, rhs, ncols):
    """One exact solution of rows @ x = rhs as Fractions, or None.

    The right-hand side is scaled together with each row, so Fraction
    entries are fine on both sides.  Free variables are set to zero.
    """
    scaled = scale_rows_to_int([list(r) + [b] for r, b in zip(rows, rhs)])
    mat = [r[:-1] for r in scaled]
    vec = [r[-1] for r in scaled]
    res = solve_int(mat, vec, ncols)
    if res is None:
        return None
    nums, den = res
    return [Fraction(a, den) for a in nums]


def in_rowspan(basis_rows, vec):
    """Is vec in the row space of basis_rows?"""
    mat = scale_rows_to_int(list(basis_rows))
    r0 = rank_int(mat)
    mat.append(scale_rows_to_int([vec])[0])
    return rank_int(mat) == r0


class Echelon:
    """Incrementally maintained integer row-echelon basis.

    Rows are primitive integer vectors keyed by pivot column.  reduce()
    runs forward elimination only, which is enough for membership tests;
    entries are stripped by their gcd after every elimination step so
    they stay small.
    """

    __slots__ = ("ncols", "rows")

    def __init__(self, ncols):
        self.ncols = ncols
        self.rows = {}

    @property
    def rank(self):
        return len(self.rows)

    def reduce(self, vec):
        """Residual of vec after elimination; all zeros iff in the span."""
        v = scale_rows_to_int([list(vec)])[0]
        for c in sorted(self.rows):
            if not v[c]:
                continue
            row = self.rows[c]
            p = row[c]
            f = v[c]
            v = [p * a - f * b for a, b in zip(v, row)]
            g = 0
            for a in v:
                g = gcd(g, a)
                if g == 1:
                    break
            if g > 1:
                v = [a // g for a in v]
        return v

    def insert(self, vec):
        """Add vec to the span; True if it enlarged the basis."""
        v = self.reduce(vec)
        lead = None
        for c, a in enumerate(v):
            if a:
                lead = c
                break
        if lead is None:
            return False
        if v[lead] < 0:
            v = [-a for a in v]
        self.rows[lead] = v
        return True

    def contains(self, vec):
        return not any(self.reduce(vec))


def det_sign(rows):
    """Sign of the determinant of a square Fraction/int matrix: -1, 0, 1."""
    mat = [[Fraction(a) for a in row] for row in rows]
    n = len(mat)
    sign = 1
    for col in range(n):
        p = None
        for r in range(col, n):
            if mat[r][col] != 0:
                p = r
                break
        if p is None:
            return 0
        if p != col:
            mat[col], mat[p] = mat[p], mat[col]
            sign = -sign
        if mat[col][col] < 0:
            sign = -sign
        for r in range(col + 1, n):
            f = mat[r][col] / mat[col][col]
            if f != 0:
                mat[r] = [a - f * b for a, b in zip(mat[r], mat[col])]
    return sign
