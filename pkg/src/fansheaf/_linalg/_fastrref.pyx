# cython: language_level=3
"""Compiled twin of fansheaf._linalg.pure.

Same Montante fraction-free Gauss-Jordan algorithm and the same canonical
output; entries stay arbitrary-precision Python ints, the speedup comes
from typed index loops and preallocated row lists.
"""

from math import gcd


cdef list _normalize(list row):
    cdef Py_ssize_t j, n = len(row)
    g = 0
    for j in range(n):
        g = gcd(g, row[j])
        if g == 1:
            break
    if g == 0:
        return row
    lead = 0
    for j in range(n):
        if row[j] != 0:
            lead = row[j]
            break
    if lead < 0:
        g = -g
    if g != 1:
        return [a // g for a in row]
    return row


def rref_int(mat):
    """Reduced row echelon form of an integer matrix; see pure.rref_int."""
    cdef list rows = [list(row) for row in mat]
    cdef Py_ssize_t nrows = len(rows)
    cdef Py_ssize_t ncols = len(rows[0]) if nrows else 0
    cdef Py_ssize_t piv = 0, col, r, i, j
    cdef list pivots = []
    cdef list prow, ri
    den = 1
    for col in range(ncols):
        if piv == nrows:
            break
        r = piv
        while r < nrows and rows[r][col] == 0:
            r += 1
        if r == nrows:
            continue
        if r != piv:
            rows[piv], rows[r] = rows[r], rows[piv]
        prow = rows[piv]
        p = prow[col]
        for i in range(nrows):
            if i == piv:
                continue
            ri = rows[i]
            f = ri[col]
            for j in range(ncols):
                ri[j] = (p * ri[j] - f * prow[j]) // den
        pivots.append(col)
        den = p
        piv += 1
    cdef list out = []
    for i in range(piv):
        out.append(_normalize(rows[i]))
    return out, pivots


def rank_int(mat):
    """Rank of an integer matrix."""
    return len(rref_int(mat)[1])


def nullspace_int(mat, ncols):
    """Primitive integer basis of the right kernel; see pure.nullspace_int."""
    rows, pivots = rref_int(mat)
    cdef set pivset = set(pivots)
    cdef list basis = []
    cdef Py_ssize_t f, i
    for f in range(ncols):
        if f in pivset:
            continue
        den = 1
        for i in range(len(pivots)):
            if rows[i][f] != 0:
                q = rows[i][pivots[i]]
                den = den * q // gcd(den, q)
        vec = [0] * ncols
        vec[f] = den
        for i in range(len(pivots)):
            if rows[i][f] != 0:
                vec[pivots[i]] = -rows[i][f] * den // rows[i][pivots[i]]
        basis.append(_normalize(vec))
    return basis


def solve_int(mat, rhs, ncols):
    """One exact solution with free variables zero; see pure.solve_int."""
    cdef list aug = [list(r) + [b] for r, b in zip(mat, rhs)]
    rows, pivots = rref_int(aug)
    if pivots and pivots[-1] == ncols:
        return None
    den = 1
    cdef Py_ssize_t i
    for i in range(len(pivots)):
        q = rows[i][pivots[i]]
        den = den * q // gcd(den, q)
    nums = [0] * ncols
    for i in range(len(pivots)):
        nums[pivots[i]] = rows[i][ncols] * den // rows[i][pivots[i]]
    return nums, den
