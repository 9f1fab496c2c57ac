"""Systematic encoding and degrees-of-freedom counts."""

from __future__ import annotations

from typing import Iterable, Optional, Sequence, Union

import numpy as np

from ..errors import RankDeficient
from ..gf2 import BitMatrix, rank, row_reduce
from .graph import TannerGraph
from .puncture import ErasurePattern, PuncturePattern


def systematic_generator(
    h: BitMatrix, parity_columns: Optional[Sequence[int]] = None
) -> tuple[BitMatrix, list[int]]:
    """Generator ``G`` (k x N) with ``G @ H.T = 0`` and an identity block.

    Returns ``(G, perm)``: ``G[:, perm]`` is ``[I_k | P]``, so ``perm[:k]`` lists
    the systematic positions and ``perm[k:]`` the parity positions. Columns in
    ``parity_columns`` are tried first as pivots, which makes them the parity
    positions whenever they are independent.
    """
    m, n = h.shape
    order = None
    if parity_columns is not None:
        first = [int(c) for c in parity_columns]
        seen = set(first)
        order = first + [c for c in range(n) if c not in seen]
    reduced, pivots = row_reduce(h, order)
    if len(pivots) < m:
        raise RankDeficient(f"H has rank {len(pivots)} < {m} rows")
    k = n - m
    if k < 1:
        raise RankDeficient("H has no free columns, so the code is {0}")
    pivot_set = set(pivots)
    free = [c for c in range(n) if c not in pivot_set]
    g = np.zeros((k, n), dtype=np.uint8)
    g[np.arange(k), free] = 1
    # pivot row i reads x[pivots[i]] = sum_f reduced[i, f] x[f]
    g[:, pivots] = reduced[:m, free].T
    perm = free + sorted(pivots)
    return BitMatrix(g), perm


def dof_ml(h: BitMatrix, unknown: Iterable[int]) -> int:
    """Dimension of the solution space for the unknown bits under ML decoding."""
    cols = sorted(set(int(v) for v in unknown))
    if not cols:
        return 0
    return len(cols) - rank(h.bits[:, cols])


def dof_mp(
    graph: TannerGraph,
    erased: Union[ErasurePattern, Iterable[int]],
    pattern: PuncturePattern,
) -> int:
    """Bits a peeling decoder must guess when R is punctured and ``erased`` is lost.

    With ``|R| = N - k`` this is exactly the number of channel-erased bits.
    """
    if not isinstance(erased, ErasurePattern):
        erased = ErasurePattern.of(pattern, erased)
    if len(pattern.punctured) != graph.n_chk:
        raise ValueError("the guess count shortcut needs |R| = N - k")
    return len(erased)
