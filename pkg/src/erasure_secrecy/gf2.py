"""Dense linear algebra over GF(2).

Matrices are exposed as 0/1 ``uint8`` arrays. Elimination routines work on
rows packed into 64-bit words so that a row operation is a handful of XORs.
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import AttemptBudgetExceeded, DimensionError, Singular

__all__ = [
    "BitMatrix",
    "multiply",
    "lu_factor",
    "lu_invert",
    "rank",
    "row_reduce",
    "random_invertible",
]

_ONE = np.uint64(1)


class BitMatrix:
    """Immutable binary matrix.

    Accepts anything convertible to a 2-D integer array whose entries are 0 or 1.
    A 1-D input is treated as a single row vector.
    """

    __slots__ = ("_bits",)

    def __init__(self, bits):
        arr = np.asarray(bits)
        if arr.ndim == 1:
            arr = arr.reshape(1, -1)
        if arr.ndim != 2:
            raise DimensionError(f"expected a 2-D array, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise DimensionError(f"matrix must be at least 1x1, got {arr.shape}")
        if arr.dtype == np.bool_:
            arr = arr.astype(np.uint8)
        elif not np.all((arr == 0) | (arr == 1)):
            raise ValueError("BitMatrix entries must be 0 or 1")
        arr = np.array(arr, dtype=np.uint8, copy=True)
        arr.flags.writeable = False
        self._bits = arr

    @classmethod
    def identity(cls, k: int) -> "BitMatrix":
        return cls(np.eye(k, dtype=np.uint8))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(np.zeros((rows, cols), dtype=np.uint8))

    @property
    def bits(self) -> np.ndarray:
        return self._bits

    @property
    def rows(self) -> int:
        return self._bits.shape[0]

    @property
    def cols(self) -> int:
        return self._bits.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._bits.shape

    @property
    def T(self) -> "BitMatrix":
        return BitMatrix(self._bits.T)

    def columns(self, idx: Iterable[int]) -> np.ndarray:
        """Return the selected columns as a plain array (may have zero columns)."""
        return self._bits[:, list(idx)]

    def __matmul__(self, other: "BitMatrix") -> "BitMatrix":
        return multiply(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self._bits, other._bits))

    def __hash__(self):
        return hash((self.shape, self._bits.tobytes()))

    def __repr__(self) -> str:
        if self.rows * self.cols <= 64:
            body = ";".join("".join(map(str, r)) for r in self._bits.tolist())
            return f"BitMatrix({self.rows}x{self.cols}: {body})"
        return f"BitMatrix({self.rows}x{self.cols})"


def _as_array(m) -> np.ndarray:
    return m.bits if isinstance(m, BitMatrix) else np.asarray(m, dtype=np.uint8)


def matmul_mod2(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Product of 0/1 arrays mod 2, for arrays of any leading shape.

    Uses floating point BLAS; integer sums stay exact below 2**53.
    """
    if a.shape[-1] != b.shape[0]:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    prod = np.asarray(a, dtype=np.float64) @ np.asarray(b, dtype=np.float64)
    return (prod.astype(np.int64) & 1).astype(np.uint8)


def multiply(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    if a.cols != b.rows:
        raise DimensionError(f"cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}")
    return BitMatrix(matmul_mod2(a.bits, b.bits))


# -- packed-row helpers -------------------------------------------------------


def _pack(bits: np.ndarray) -> np.ndarray:
    rows, cols = bits.shape
    n_bytes = -(-cols // 64) * 8
    packed = np.zeros((rows, n_bytes), dtype=np.uint8)
    if cols:
        pb = np.packbits(bits.astype(np.uint8), axis=1, bitorder="little")
        packed[:, : pb.shape[1]] = pb
    return packed.view("<u8").copy()


def _unpack(words: np.ndarray, cols: int) -> np.ndarray:
    as_bytes = np.ascontiguousarray(words).view(np.uint8)
    return np.unpackbits(as_bytes, axis=1, count=cols, bitorder="little")


def _column(words: np.ndarray, c: int) -> np.ndarray:
    return ((words[:, c >> 6] >> np.uint64(c & 63)) & _ONE).astype(bool)


def row_reduce(
    m, column_order: Optional[Sequence[int]] = None
) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over GF(2).

    Pivot columns are searched in ``column_order`` (default: left to right), so a
    caller can steer which columns end up as pivots. Returns the reduced array
    (zero rows at the bottom) and the pivot columns in pivot-row order.
    """
    bits = _as_array(m)
    rows, cols = bits.shape
    work = _pack(bits)
    order = range(cols) if column_order is None else column_order
    pivots: list[int] = []
    r = 0
    for c in order:
        if r == rows:
            break
        col = _column(work, c)
        below = np.flatnonzero(col[r:])
        if below.size == 0:
            continue
        p = r + int(below[0])
        if p != r:
            work[[r, p]] = work[[p, r]]
            col[[r, p]] = col[[p, r]]
        col[r] = False
        if col.any():
            work[col] ^= work[r]
        pivots.append(int(c))
        r += 1
    return _unpack(work, cols), pivots


def rank(m) -> int:
    """Row rank over GF(2). Works for any shape, including zero columns."""
    bits = _as_array(m)
    if bits.size == 0:
        return 0
    work = _pack(bits)
    rows, cols = bits.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        col = _column(work, c)
        below = np.flatnonzero(col[r:])
        if below.size == 0:
            continue
        p = r + int(below[0])
        if p != r:
            work[[r, p]] = work[[p, r]]
            col[[r, p]] = col[[p, r]]
        col[: r + 1] = False
        if col.any():
            work[col] ^= work[r]
        r += 1
    return r


def lu_factor(m: BitMatrix) -> tuple[np.ndarray, BitMatrix, BitMatrix]:
    """Factor ``P @ m = L @ U`` with L unit lower triangular and U upper triangular.

    Returns ``(perm, L, U)`` where row ``i`` of ``P @ m`` is row ``perm[i]`` of m.
    Raises Singular if m has no inverse.
    """
    if m.rows != m.cols:
        raise DimensionError(f"LU factorization needs a square matrix, got {m.shape}")
    n = m.rows
    work = _pack(m.bits)
    lower = np.zeros((n, n), dtype=np.uint8)
    perm = np.arange(n)
    for c in range(n):
        col = _column(work, c)
        below = np.flatnonzero(col[c:])
        if below.size == 0:
            raise Singular(f"matrix is singular (no pivot in column {c})")
        p = c + int(below[0])
        if p != c:
            work[[c, p]] = work[[p, c]]
            lower[[c, p], :c] = lower[[p, c], :c]
            perm[[c, p]] = perm[[p, c]]
            col[[c, p]] = col[[p, c]]
        col[: c + 1] = False
        if col.any():
            work[col] ^= work[c]
            lower[col, c] = 1
    np.fill_diagonal(lower, 1)
    return perm, BitMatrix(lower), BitMatrix(_unpack(work, n))


def lu_invert(m: BitMatrix) -> BitMatrix:
    """Inverse over GF(2) through an LU factorization."""
    perm, lower, upper = lu_factor(m)
    n = m.rows
    # P as a packed right-hand side: row i is unit vector e_{perm[i]}.
    rhs = np.zeros((n, n), dtype=np.uint8)
    rhs[np.arange(n), perm] = 1
    y = _pack(rhs)
    low = lower.bits.astype(bool)
    for j in range(n - 1):
        mask = low[j + 1 :, j]
        if mask.any():
            y[j + 1 :][mask] ^= y[j]
    up = upper.bits.astype(bool)
    for j in range(n - 1, 0, -1):
        mask = up[:j, j]
        if mask.any():
            y[:j][mask] ^= y[j]
    return BitMatrix(_unpack(y, n))


def random_invertible(k: int, rng: np.random.Generator, max_attempts: int = 64) -> BitMatrix:
    """Draw uniform random k x k binary matrices until one is invertible."""
    if k < 1:
        raise DimensionError("k must be at least 1")
    for _ in range(max_attempts):
        cand = rng.integers(0, 2, size=(k, k), dtype=np.uint8)
        if rank(cand) == k:
            return BitMatrix(cand)
    raise AttemptBudgetExceeded(f"no invertible {k}x{k} matrix in {max_attempts} attempts")
