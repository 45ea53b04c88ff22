"""Exact linear algebra over the Scalar field.

Forward elimination is Bareiss' fraction-free scheme: after step ``k`` every
entry below the pivots is a ``(k+1)``-minor of the input, so the sizes of
intermediate rational functions stay bounded by minors of the original
matrix.  Pivots are chosen leftmost-column first, then topmost row.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .scalar import Scalar, content_reduce

Matrix = list[list[Scalar]]


@dataclass
class Echelon:
    rows: Matrix
    pivots: list[tuple[int, int]]  # (row, column) in the permuted row order
    perm: list[int]  # perm[k] = original index of row k

    @property
    def rank(self) -> int:
        return len(self.pivots)

    @property
    def pivot_columns(self) -> list[int]:
        return [c for _, c in self.pivots]


def _copy(M: Sequence[Sequence[Scalar]]) -> Matrix:
    return [list(r) for r in M]


def bareiss(M: Sequence[Sequence[Scalar]]) -> Echelon:
    A = _copy(M)
    nrows = len(A)
    ncols = len(A[0]) if nrows else 0
    perm = list(range(nrows))
    pivots = []
    prev = None
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        p = next((i for i in range(r, nrows) if not A[i][c].is_zero()), None)
        if p is None:
            continue
        if p != r:
            A[r], A[p] = A[p], A[r]
            perm[r], perm[p] = perm[p], perm[r]
        piv = A[r][c]
        for i in range(r + 1, nrows):
            a_ic = A[i][c]
            row_i = A[i]
            row_r = A[r]
            for j in range(c + 1, ncols):
                v = piv * row_i[j]
                if not a_ic.is_zero() and not row_r[j].is_zero():
                    v = v - a_ic * row_r[j]
                if prev is not None and not v.is_zero():
                    v = v / prev
                row_i[j] = v
            row_i[c] = piv.chart.zero
        pivots.append((r, c))
        prev = piv
        r += 1
    return Echelon(A, pivots, perm)


def rank(M: Sequence[Sequence[Scalar]]) -> int:
    if not M or not M[0]:
        return 0
    return bareiss(M).rank


def determinant(M: Sequence[Sequence[Scalar]]) -> Scalar:
    n = len(M)
    if n == 0:
        raise ValueError("empty matrix")
    if any(len(r) != n for r in M):
        raise ValueError("determinant of a non-square matrix")
    ch = M[0][0].chart
    E = bareiss(M)
    if E.rank < n:
        return ch.zero
    d = E.rows[n - 1][n - 1]
    return -d if _perm_parity(E.perm) else d


def _perm_parity(perm: Sequence[int]) -> int:
    seen = [False] * len(perm)
    parity = 0
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        parity ^= (length - 1) & 1
    return parity


def rref(M: Sequence[Sequence[Scalar]]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns."""
    E = bareiss(M)
    A = [row for row in E.rows[: E.rank]]
    piv = E.pivot_columns
    ncols = len(M[0]) if M else 0
    for k in range(len(A) - 1, -1, -1):
        c = piv[k]
        inv = A[k][c].inverse()
        A[k] = [v * inv if not v.is_zero() else v for v in A[k]]
        for i in range(k):
            f = A[i][c]
            if f.is_zero():
                continue
            A[i] = [a - f * b if not b.is_zero() else a for a, b in zip(A[i], A[k])]
    return A, piv


def nullspace(M: Sequence[Sequence[Scalar]], reduce: bool = True) -> list[list[Scalar]]:
    """Basis of ``{v : M v = 0}``; each vector content-reduced when ``reduce``."""
    if not M:
        raise ValueError("empty matrix")
    ncols = len(M[0])
    ch = M[0][0].chart
    R, piv = rref(M)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        v = [ch.zero] * ncols
        v[f] = ch.one
        for k, c in enumerate(piv):
            v[c] = -R[k][f]
        basis.append(content_reduce(v) if reduce else v)
    return basis


def inverse(M: Sequence[Sequence[Scalar]]) -> Matrix:
    n = len(M)
    ch = M[0][0].chart
    aug = [list(M[i]) + [ch.one if j == i else ch.zero for j in range(n)] for i in range(n)]
    R, piv = rref(aug)
    if piv[:n] != list(range(n)) or len(piv) < n:
        raise ZeroDivisionError("matrix is singular over the fraction field")
    return [row[n:] for row in R]


def matmul(A: Sequence[Sequence[Scalar]], B: Sequence[Sequence[Scalar]]) -> Matrix:
    ch = A[0][0].chart
    m, k, n = len(A), len(B), len(B[0])
    out = []
    for i in range(m):
        row = []
        for j in range(n):
            s = ch.zero
            for t in range(k):
                a = A[i][t]
                if a.is_zero():
                    continue
                b = B[t][j]
                if b.is_zero():
                    continue
                s = s + a * b
            row.append(s)
        out.append(row)
    return out


def transpose(A: Sequence[Sequence[Scalar]]) -> Matrix:
    return [list(r) for r in zip(*A)]


def is_zero_matrix(A: Sequence[Sequence[Scalar]]) -> bool:
    return all(v.is_zero() for row in A for v in row)


def sub(A, B) -> Matrix:
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


class RowSolver:
    """Express vectors as combinations of fixed independent rows.

    Picks the leftmost maximal set of independent columns once, inverts
    that square block, then solves each target with a matrix-vector
    product and checks the residual on all columns.
    """

    def __init__(self, rows: Sequence[Sequence[Scalar]]):
        self.rows = [list(r) for r in rows]
        k = len(self.rows)
        E = bareiss(transpose(self.rows))  # columns of the row-matrix become rows
        if E.rank < k:
            raise ValueError("rows are linearly dependent")
        # independent columns of the row-matrix = pivot rows of the transpose
        cols = sorted(E.perm[r] for r, _ in E.pivots)
        self.columns = cols
        block = [[row[c] for c in cols] for row in self.rows]
        self.block_inv = inverse(block)

    def solve(self, target: Sequence[Scalar]) -> tuple[list[Scalar] | None, list[Scalar]]:
        """Coefficients ``c`` with ``sum c_i rows_i = target`` and the residual."""
        ch = target[0].chart
        t = [target[c] for c in self.columns]
        k = len(self.rows)
        coeffs = []
        for i in range(k):
            s = ch.zero
            for j in range(k):
                if t[j].is_zero() or self.block_inv[j][i].is_zero():
                    continue
                s = s + t[j] * self.block_inv[j][i]
            coeffs.append(s)
        residual = list(target)
        for ci, row in zip(coeffs, self.rows):
            if ci.is_zero():
                continue
            residual = [r - ci * v if not v.is_zero() else r for r, v in zip(residual, row)]
        ok = all(r.is_zero() for r in residual)
        return (coeffs if ok else None), residual


def span_equal(A: Sequence[Sequence[Scalar]], B: Sequence[Sequence[Scalar]]) -> bool:
    ra, rb = rank(A), rank(B)
    return ra == rb and rank(list(A) + list(B)) == ra


# ---------------------------------------------------------------------------
# numeric rank of evaluated matrices


def numeric_rank(rows: Sequence[Sequence], tol: float = 1e-9) -> int:
    """Rank of a matrix of numbers; exact when every entry is rational."""
    if not rows:
        return 0
    if all(isinstance(v, (int, Fraction)) for r in rows for v in r):
        A = [[Fraction(v) for v in r] for r in rows]
        nr, nc = len(A), len(A[0])
        rk = 0
        for c in range(nc):
            p = next((i for i in range(rk, nr) if A[i][c] != 0), None)
            if p is None:
                continue
            A[rk], A[p] = A[p], A[rk]
            for i in range(rk + 1, nr):
                f = A[i][c] / A[rk][c]
                if f:
                    A[i] = [a - f * b for a, b in zip(A[i], A[rk])]
            rk += 1
            if rk == nr:
                break
        return rk
    arr = np.array([[float(v) for v in r] for r in rows], dtype=float)
    if arr.size == 0:
        return 0
    return int(np.linalg.matrix_rank(arr, tol=tol * max(1.0, np.abs(arr).max())))
