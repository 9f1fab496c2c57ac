"""Reading and writing parity-check matrices in alist format.

Layout: ``N M``; max column and row degree; the N column degrees; the M row
degrees; N lines of 1-indexed row positions per column; M lines of 1-indexed
column positions per row. Zero entries pad short lines and are ignored.
"""

from __future__ import annotations

import os
from typing import Union

import numpy as np

from ..gf2 import BitMatrix

PathLike = Union[str, os.PathLike]


class AlistError(ValueError):
    pass


def _int_lines(text: str) -> list[list[int]]:
    lines = []
    for raw in text.splitlines():
        raw = raw.strip()
        if raw:
            try:
                lines.append([int(tok) for tok in raw.split()])
            except ValueError as exc:
                raise AlistError(f"non-integer token in line {raw!r}") from exc
    return lines


def parse_alist(text: str) -> BitMatrix:
    lines = _int_lines(text)
    if len(lines) < 4:
        raise AlistError("alist needs at least a header, max degrees and two degree lists")
    if len(lines[0]) != 2:
        raise AlistError("first line must be 'N M'")
    n, m = lines[0]
    if n <= 0 or m <= 0:
        raise AlistError("non-positive matrix dimensions")
    col_deg = lines[2]
    row_deg = lines[3]
    if len(col_deg) != n or len(row_deg) != m:
        raise AlistError("degree list lengths do not match 'N M'")
    if len(lines) < 4 + n:
        raise AlistError(f"expected {n} column adjacency lines")
    h = np.zeros((m, n), dtype=np.uint8)
    for j in range(n):
        rows = [r for r in lines[4 + j] if r != 0]
        if len(rows) != col_deg[j]:
            raise AlistError(f"column {j + 1}: declared degree {col_deg[j]}, found {len(rows)} entries")
        for r in rows:
            if not 1 <= r <= m:
                raise AlistError(f"column {j + 1}: row index {r} out of range")
            if h[r - 1, j]:
                raise AlistError(f"column {j + 1}: repeated row index {r}")
            h[r - 1, j] = 1
    row_lines = lines[4 + n : 4 + n + m]
    if row_lines:
        if len(row_lines) != m:
            raise AlistError(f"expected {m} row adjacency lines, found {len(row_lines)}")
        check = np.zeros_like(h)
        for i, cols in enumerate(row_lines):
            for c in cols:
                if c != 0:
                    if not 1 <= c <= n:
                        raise AlistError(f"row {i + 1}: column index {c} out of range")
                    check[i, c - 1] = 1
        if not np.array_equal(check, h):
            raise AlistError("row and column adjacency lists disagree")
    if not np.array_equal(h.sum(axis=1), row_deg):
        raise AlistError("row degrees do not match the adjacency lists")
    return BitMatrix(h)


def read_alist(path: PathLike) -> BitMatrix:
    with open(path, "r") as f:
        return parse_alist(f.read())


def format_alist(h: BitMatrix, pad: bool = True) -> str:
    bits = h.bits if isinstance(h, BitMatrix) else BitMatrix(h).bits
    m, n = bits.shape
    col_deg = bits.sum(axis=0)
    row_deg = bits.sum(axis=1)
    max_col = int(col_deg.max())
    max_row = int(row_deg.max())
    out = [f"{n} {m}", f"{max_col} {max_row}"]
    out.append(" ".join(map(str, col_deg.tolist())))
    out.append(" ".join(map(str, row_deg.tolist())))
    for j in range(n):
        idx = (np.flatnonzero(bits[:, j]) + 1).tolist()
        if pad:
            idx += [0] * (max_col - len(idx))
        # a lone 0 keeps a degree-0 column on its own non-blank line
        out.append(" ".join(map(str, idx or [0])))
    for i in range(m):
        idx = (np.flatnonzero(bits[i]) + 1).tolist()
        if pad:
            idx += [0] * (max_row - len(idx))
        out.append(" ".join(map(str, idx or [0])))
    return "\n".join(out) + "\n"


def write_alist(h: BitMatrix, path: PathLike, pad: bool = True) -> None:
    with open(path, "w") as f:
        f.write(format_alist(h, pad=pad))
