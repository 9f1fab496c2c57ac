"""Brute-force reference implementations, independent of the package code paths."""

from __future__ import annotations

import itertools

import numpy as np


def is_stopping_set(h: np.ndarray, subset) -> bool:
    """Every check touching ``subset`` touches it at least twice."""
    subset = list(subset)
    if not subset:
        return True
    counts = h[:, subset].sum(axis=1)
    return bool(np.all((counts == 0) | (counts >= 2)))


def maximal_stopping_set_bruteforce(h: np.ndarray, subset) -> frozenset:
    """Union of all stopping sets inside ``subset`` (itself the maximal one)."""
    subset = sorted(subset)
    best: set = set()
    for r in range(1, len(subset) + 1):
        for combo in itertools.combinations(subset, r):
            if is_stopping_set(h, combo):
                best.update(combo)
    return frozenset(best)


def matmul_loops(a, b):
    a = np.asarray(a).tolist()
    b = np.asarray(b).tolist()
    n, m, p = len(a), len(b), len(b[0])
    out = [[0] * p for _ in range(n)]
    for i in range(n):
        for j in range(p):
            s = 0
            for t in range(m):
                s ^= a[i][t] & b[t][j]
            out[i][j] = s
    return np.array(out, dtype=np.uint8)


def rank_by_span(m) -> int:
    """log2 of the number of distinct vectors in the row span."""
    rows = [int("".join(map(str, r)), 2) for r in np.asarray(m).tolist()]
    span = {0}
    for r in rows:
        span |= {x ^ r for x in span}
    return len(span).bit_length() - 1


def codewords(h: np.ndarray) -> np.ndarray:
    """All codewords of the null space of ``h`` by enumeration (small N only)."""
    n = h.shape[1]
    words = np.array(list(itertools.product((0, 1), repeat=n)), dtype=np.int64)
    ok = ((words @ h.T.astype(np.int64)) % 2 == 0).all(axis=1)
    return words[ok].astype(np.uint8)


def guess_count_bruteforce(h: np.ndarray, unknown, truth=None, cws=None) -> int:
    """log2 of the number of codewords agreeing with ``truth`` outside ``unknown``.

    That count is the number of bits an ML decoder is left to guess. Pass
    ``cws`` to reuse an enumeration across calls.
    """
    if cws is None:
        cws = codewords(h)
    if truth is None:
        truth = cws[0]
    known = [j for j in range(h.shape[1]) if j not in set(unknown)]
    agree = (cws[:, known] == truth[known]).all(axis=1) if known else np.ones(len(cws), bool)
    count = int(agree.sum())
    return count.bit_length() - 1


def peel_residual_naive(h: np.ndarray, unknown) -> set:
    """Textbook peeling: repeatedly resolve the lone unknown of any check."""
    left = set(unknown)
    progress = True
    while progress and left:
        progress = False
        for row in h:
            hits = [j for j in np.flatnonzero(row) if j in left]
            if len(hits) == 1:
                left.discard(hits[0])
                progress = True
    return left
