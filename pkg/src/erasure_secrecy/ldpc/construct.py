"""Random parity-check matrices with a prescribed variable-degree profile."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from ..gf2 import BitMatrix


@dataclass(frozen=True)
class DegreeSpec:
    """Fraction of variable nodes per degree. Check degrees are kept as even as possible.

    Text form: ``"3"`` (every variable has degree 3) or ``"2:0.6,3:0.3,8:0.1"``.
    """

    var_fractions: tuple[tuple[int, float], ...]

    def __post_init__(self):
        if not self.var_fractions:
            raise ValueError("degree spec is empty")
        total = sum(f for _, f in self.var_fractions)
        if any(d < 0 for d, _ in self.var_fractions) or any(f < 0 for _, f in self.var_fractions):
            raise ValueError("degrees and fractions must be nonnegative")
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"degree fractions sum to {total}, expected 1")

    @classmethod
    def regular(cls, degree: int) -> "DegreeSpec":
        return cls(((int(degree), 1.0),))

    @classmethod
    def from_mapping(cls, fractions: Mapping[int, float]) -> "DegreeSpec":
        return cls(tuple(sorted((int(d), float(f)) for d, f in fractions.items())))

    @classmethod
    def parse(cls, text: str) -> "DegreeSpec":
        text = text.strip()
        if text.startswith("regular:"):
            text = text.split(":", 1)[1].split(",")[0]
        if ":" not in text:
            return cls.regular(int(text))
        pairs = {}
        for item in text.split(","):
            d, f = item.split(":")
            pairs[int(d)] = pairs.get(int(d), 0.0) + float(f)
        return cls.from_mapping(pairs)

    def __str__(self) -> str:
        if len(self.var_fractions) == 1:
            return str(self.var_fractions[0][0])
        return ",".join(f"{d}:{f:g}" for d, f in self.var_fractions)

    def degree_sequence(self, n_var: int) -> np.ndarray:
        """Per-node degrees, rounded by largest remainder to exactly ``n_var`` nodes."""
        degrees = [d for d, _ in self.var_fractions]
        exact = np.array([f * n_var for _, f in self.var_fractions])
        counts = np.floor(exact).astype(int)
        short = n_var - counts.sum()
        order = np.argsort(-(exact - counts), kind="stable")
        counts[order[:short]] += 1
        return np.repeat(degrees, counts)


def _creates_4cycle(c: int, chosen: list[int], chk_nbrs: list[set], var_nbrs: list[set]) -> bool:
    if not chosen:
        return False
    own = set(chosen)
    return any(var_nbrs[w] & own for w in chk_nbrs[c])


def random_ldpc(
    n_var: int,
    n_chk: int,
    spec: DegreeSpec,
    rng: np.random.Generator,
    avoid_4cycles: bool = False,
    max_tries: int = 50,
) -> BitMatrix:
    """Random (n_chk x n_var) parity-check matrix without repeated edges.

    Variables pick distinct checks with probability proportional to the check's
    remaining socket count. With ``avoid_4cycles`` a pick closing a length-4 cycle
    is resampled; a whole new draw is made when a variable cannot be placed.
    """
    if n_chk < 1 or n_var <= n_chk:
        raise ValueError(f"need n_var > n_chk >= 1, got n_var={n_var}, n_chk={n_chk}")
    degrees = spec.degree_sequence(n_var)
    if degrees.max() > n_chk:
        raise ValueError(f"variable degree {degrees.max()} exceeds the {n_chk} checks")
    n_edges = int(degrees.sum())
    base, extra = divmod(n_edges, n_chk)
    for _ in range(max_tries):
        var_deg = rng.permutation(degrees)
        capacity = np.full(n_chk, base, dtype=np.int64)
        capacity[rng.choice(n_chk, size=extra, replace=False)] += 1
        chk_nbrs: list[set] = [set() for _ in range(n_chk)]
        var_nbrs: list[set] = [set() for _ in range(n_var)]
        ok = True
        # Place high-degree variables first while capacity is plentiful.
        for v in np.argsort(-var_deg, kind="stable"):
            v = int(v)
            chosen: list[int] = []
            for _slot in range(int(var_deg[v])):
                weights = capacity.astype(np.float64)
                weights[chosen] = 0.0
                placed = False
                for _attempt in range(20):
                    total = weights.sum()
                    if total <= 0:
                        break
                    c = int(rng.choice(n_chk, p=weights / total))
                    if avoid_4cycles and _creates_4cycle(c, chosen, chk_nbrs, var_nbrs):
                        weights[c] = 0.0
                        continue
                    placed = True
                    break
                if not placed:
                    ok = False
                    break
                chosen.append(c)
                capacity[c] -= 1
            if not ok:
                break
            for c in chosen:
                chk_nbrs[c].add(v)
                var_nbrs[v].add(c)
        if ok:
            h = np.zeros((n_chk, n_var), dtype=np.uint8)
            for v, cs in enumerate(var_nbrs):
                h[list(cs), v] = 1
            return BitMatrix(h)
    raise RuntimeError(f"could not place all edges in {max_tries} draws")


def has_4cycle(h: BitMatrix) -> bool:
    """True if two checks share two or more variables."""
    bits = h.bits.astype(np.int64)
    overlap = bits @ bits.T
    np.fill_diagonal(overlap, 0)
    return bool((overlap >= 2).any())
