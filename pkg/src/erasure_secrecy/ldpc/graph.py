"""Tanner graph and the peeling (message-passing) erasure decoder."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ..errors import InconsistentInput
from ..gf2 import BitMatrix

ERASED = -1


class TannerGraph:
    """Bipartite graph of a parity-check matrix: check ``i`` touches variable ``j`` iff ``H[i, j] = 1``."""

    def __init__(self, h: BitMatrix):
        if not isinstance(h, BitMatrix):
            h = BitMatrix(h)
        self.h = h
        self.n_chk, self.n_var = h.shape
        rows, cols = np.nonzero(h.bits)
        self.chk_vars: list[np.ndarray] = [cols[rows == i] for i in range(self.n_chk)]
        by_col = np.argsort(cols, kind="stable")
        self.var_chks: list[np.ndarray] = np.split(
            rows[by_col], np.cumsum(np.bincount(cols, minlength=self.n_var))[:-1]
        )
        self._chk_lists = [c.tolist() for c in self.chk_vars]
        self._var_lists = [v.tolist() for v in self.var_chks]

    @property
    def n_edges(self) -> int:
        return int(self.h.bits.sum())

    def edges(self) -> list[tuple[int, int]]:
        """``(check, variable)`` pairs."""
        return [(i, j) for i, vs in enumerate(self._chk_lists) for j in vs]

    def var_degrees(self) -> np.ndarray:
        return self.h.bits.sum(axis=0)

    def chk_degrees(self) -> np.ndarray:
        return self.h.bits.sum(axis=1)

    def neighbors_of_var(self, v: int) -> list[int]:
        return self._var_lists[v]

    def neighbors_of_chk(self, c: int) -> list[int]:
        return self._chk_lists[c]

    def __repr__(self) -> str:
        return f"TannerGraph(n_var={self.n_var}, n_chk={self.n_chk}, edges={self.n_edges})"


def peel_schedule(
    graph: TannerGraph, unknown: Iterable[int]
) -> tuple[list[tuple[int, int]], frozenset[int]]:
    """Run peeling on the variable set ``unknown``, ignoring bit values.

    Returns the resolution order as ``(variable, check)`` pairs and the residual
    unknown set, which is the maximal stopping set inside ``unknown``.
    """
    unknown = set(int(v) for v in unknown)
    var_lists = graph._var_lists
    count: dict[int, int] = {}
    idsum: dict[int, int] = {}
    for v in unknown:
        for c in var_lists[v]:
            count[c] = count.get(c, 0) + 1
            idsum[c] = idsum.get(c, 0) + v
    queue = deque(c for c, n in count.items() if n == 1)
    schedule: list[tuple[int, int]] = []
    while queue:
        c = queue.popleft()
        if count[c] != 1:
            continue
        v = idsum[c]
        unknown.discard(v)
        schedule.append((v, c))
        for u in var_lists[v]:
            count[u] -= 1
            idsum[u] -= v
            if count[u] == 1:
                queue.append(u)
    return schedule, frozenset(unknown)


def maximal_stopping_set(graph: TannerGraph, subset: Iterable[int]) -> frozenset[int]:
    """Largest stopping set contained in ``subset`` (possibly empty)."""
    return peel_schedule(graph, subset)[1]


def apply_schedule(
    graph: TannerGraph, values: np.ndarray, schedule: Sequence[tuple[int, int]]
) -> None:
    """Fill resolved positions in place. ``values`` is ``(..., n_var)``; unresolved entries must be 0."""
    chk_vars = graph.chk_vars
    for v, c in schedule:
        others = chk_vars[c]
        values[..., v] = values[..., others].sum(axis=-1) & 1


def check_consistency(graph: TannerGraph, values: np.ndarray, unknown: Iterable[int]) -> None:
    """Raise InconsistentInput if a check with no unknown neighbors has odd parity."""
    bits = np.atleast_2d(values)
    h = graph.h.bits
    touched = np.zeros(graph.n_chk, dtype=bool)
    unk = list(unknown)
    if unk:
        touched = h[:, unk].any(axis=1)
    full = np.flatnonzero(~touched)
    if full.size == 0:
        return
    syndrome = (bits.astype(np.int64) @ h[full].T.astype(np.int64)) & 1
    bad = np.argwhere(syndrome)
    if bad.size:
        word, idx = bad[0]
        raise InconsistentInput(
            f"parity check {int(full[idx])} is violated by known bits (codeword {int(word)})"
        )


@dataclass(frozen=True)
class PeelResult:
    """Outcome of :func:`peel_decode`.

    ``bits`` holds the decoded values with ``ERASED`` at residual positions.
    """

    bits: np.ndarray
    residual: frozenset[int]

    @property
    def complete(self) -> bool:
        return not self.residual


def peel_decode(graph: TannerGraph, known) -> PeelResult:
    """Decode one word (1-D) or a batch sharing the same erasure positions (2-D).

    ``known`` holds 0/1 for received bits and ``ERASED`` (-1) for erased ones.
    """
    arr = np.array(known, dtype=np.int8)
    if arr.shape[-1] != graph.n_var:
        raise ValueError(f"expected {graph.n_var} bits, got {arr.shape[-1]}")
    mask = arr == ERASED
    if arr.ndim == 2 and not (mask == mask[0]).all():
        raise ValueError("batched decoding needs identical erasure positions in every word")
    erased = np.flatnonzero(mask if arr.ndim == 1 else mask[0])
    schedule, residual = peel_schedule(graph, erased.tolist())
    work = np.where(mask, 0, arr).astype(np.uint8)
    apply_schedule(graph, work, schedule)
    check_consistency(graph, work, residual)
    out = work.astype(np.int8)
    if residual:
        out[..., sorted(residual)] = ERASED
    return PeelResult(out, residual)
