"""Dense matrices over GF(2^m), backed by numpy int arrays."""
from __future__ import annotations

from fractions import Fraction
from math import isqrt

import numpy as np

from .errors import DimensionError, SingularMatrix


class GfMatrix:
    """A rows x cols matrix whose entries live in ``field``."""

    __slots__ = ("field", "data")

    def __init__(self, field, data):
        arr = np.array(data, dtype=np.int64)
        if arr.ndim != 2:
            raise DimensionError(f"expected a 2-D array, got shape {arr.shape}")
        if arr.size and (arr.min() < 0 or arr.max() >= field.size):
            raise ValueError("matrix entries outside the field")
        self.field = field
        self.data = arr

    @classmethod
    def _wrap(cls, field, arr):
        out = cls.__new__(cls)
        out.field = field
        out.data = arr
        return out

    @classmethod
    def identity(cls, field, n):
        return cls._wrap(field, np.eye(n, dtype=np.int64))

    @classmethod
    def zeros(cls, field, rows, cols):
        return cls._wrap(field, np.zeros((rows, cols), dtype=np.int64))

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self):
        return self.data.shape

    @property
    def T(self) -> "GfMatrix":
        return GfMatrix._wrap(self.field, self.data.T.copy())

    def __matmul__(self, other):
        return mat_mul(self, other)

    def __add__(self, other):
        if self.shape != other.shape:
            raise DimensionError(f"cannot add {self.shape} and {other.shape}")
        return GfMatrix._wrap(self.field, self.data ^ other.data)

    __sub__ = __add__

    def __eq__(self, other):
        if not isinstance(other, GfMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.data, other.data))

    def __getitem__(self, idx):
        return self.data[idx]

    def __repr__(self):
        return f"GfMatrix({self.data.tolist()!r})"

    def scale(self, c):
        return GfMatrix._wrap(self.field, self.field.mul_arr(self.data, c))

    def select_cols(self, idx) -> "GfMatrix":
        """Columns in the given order (duplicates allowed)."""
        return GfMatrix._wrap(self.field, self.data[:, list(idx)])

    def select_rows(self, idx) -> "GfMatrix":
        return GfMatrix._wrap(self.field, self.data[list(idx), :])

    def vstack(self, other) -> "GfMatrix":
        return GfMatrix._wrap(self.field, np.vstack([self.data, other.data]))

    def tolist(self):
        return self.data.tolist()

    def inv(self) -> "GfMatrix":
        return mat_inv(self)

    def rank(self) -> int:
        return mat_rank(self)


_BROADCAST_LIMIT = 1 << 21


def mat_mul(A: GfMatrix, B: GfMatrix) -> GfMatrix:
    if A.cols != B.rows:
        raise DimensionError(f"cannot multiply {A.shape} by {B.shape}")
    return GfMatrix._wrap(A.field, mul_arrays(A.field, A.data, B.data))


def mul_arrays(f, a, b):
    """Matrix product of raw int arrays over field f."""
    if a.shape[0] * a.shape[1] * b.shape[1] <= _BROADCAST_LIMIT:
        return np.bitwise_xor.reduce(f.mul_arr(a[:, :, None], b[None, :, :]), axis=1)
    # large operands: accumulate one inner index at a time to bound memory
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    for t in range(a.shape[1]):
        out ^= f.mul_arr(a[:, t:t + 1], b[t][None, :])
    return out


def vec_mat(v, M: GfMatrix):
    """Row vector times matrix, returned as a plain list."""
    f = M.field
    terms = f.mul_arr(np.asarray(v, dtype=np.int64)[:, None], M.data)
    return np.bitwise_xor.reduce(terms, axis=0).tolist()


def _eliminate(f, work, pivot_row, col):
    """Zero ``col`` in every row except ``pivot_row`` (whose pivot must be 1)."""
    factors = work[:, col].copy()
    factors[pivot_row] = 0
    work ^= f.mul_arr(factors[:, None], work[pivot_row][None, :])


def mat_inv(A: GfMatrix) -> GfMatrix:
    """Gauss-Jordan inverse.  Raises SingularMatrix when A has no inverse."""
    if A.rows != A.cols:
        raise DimensionError(f"cannot invert non-square {A.shape}")
    f = A.field
    n = A.rows
    work = np.hstack([A.data, np.eye(n, dtype=np.int64)])
    for col in range(n):
        nz = np.nonzero(work[col:, col])[0]
        if nz.size == 0:
            raise SingularMatrix("matrix is singular")
        piv = col + int(nz[0])
        if piv != col:
            work[[col, piv]] = work[[piv, col]]
        work[col] = f.mul_arr(work[col], f.inv(int(work[col, col])))
        _eliminate(f, work, col, col)
    return GfMatrix._wrap(f, work[:, n:].copy())


def pivot_columns(A: GfMatrix):
    """Indices of a maximal set of linearly independent columns (leftmost first)."""
    f = A.field
    work = A.data.copy()
    rank, pivots = 0, []
    for col in range(A.cols):
        if rank == A.rows:
            break
        nz = np.nonzero(work[rank:, col])[0]
        if nz.size == 0:
            continue
        piv = rank + int(nz[0])
        if piv != rank:
            work[[rank, piv]] = work[[piv, rank]]
        work[rank] = f.mul_arr(work[rank], f.inv(int(work[rank, col])))
        _eliminate(f, work, rank, col)
        pivots.append(col)
        rank += 1
    return pivots


def mat_rank(A: GfMatrix) -> int:
    return len(pivot_columns(A))


# -- symmetric packing ------------------------------------------------------

def sym_order(count: int) -> int:
    """Order a with a(a+1)/2 == count, or DimensionError."""
    a = (isqrt(8 * count + 1) - 1) // 2
    if a * (a + 1) // 2 != count:
        raise DimensionError(f"{count} symbols do not fill a symmetric matrix")
    return a


def unpack_symmetric(symbols, field, order: int | None = None) -> GfMatrix:
    """Fill the upper triangle row by row, mirror into the lower triangle."""
    symbols = list(symbols)
    a = sym_order(len(symbols))
    if order is not None and order != a:
        raise DimensionError(f"expected {order * (order + 1) // 2} symbols, got {len(symbols)}")
    M = np.zeros((a, a), dtype=np.int64)
    iu = np.triu_indices(a)
    M[iu] = symbols
    M.T[iu] = symbols
    return GfMatrix(field, M)


def pack_symmetric(M: GfMatrix):
    if M.rows != M.cols:
        raise DimensionError(f"cannot pack non-square {M.shape}")
    return M.data[np.triu_indices(M.rows)].tolist()


def is_symmetric(M: GfMatrix) -> bool:
    return M.rows == M.cols and bool(np.array_equal(M.data, M.data.T))


def row_weights(G: GfMatrix):
    return np.count_nonzero(G.data, axis=1).tolist()


def update_complexity(G: GfMatrix):
    """Max row Hamming weight of G and its ratio to n (the all-nonzero baseline)."""
    w = max(row_weights(G))
    if w == 0:
        raise ValueError("update complexity of a zero matrix is undefined")
    return w, Fraction(w, G.cols)
