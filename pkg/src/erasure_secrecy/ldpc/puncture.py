"""Puncturing patterns whose punctured set is always recoverable by peeling."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

import numpy as np

from ..errors import PatternNotFound
from .graph import TannerGraph, peel_schedule

__all__ = [
    "PuncturePattern",
    "ErasurePattern",
    "Certificate",
    "Violation",
    "PeelableSet",
    "find_puncture_pattern",
    "certify_pattern",
]


@dataclass(frozen=True)
class PuncturePattern:
    """Punctured positions R and transmitted positions Q, both ascending."""

    punctured: tuple[int, ...]
    n_var: int
    restarts: int = field(default=0, compare=False)

    def __post_init__(self):
        r = tuple(sorted(int(v) for v in self.punctured))
        if len(set(r)) != len(r):
            raise ValueError("punctured positions must be distinct")
        if r and (r[0] < 0 or r[-1] >= self.n_var):
            raise ValueError(f"punctured positions must lie in [0, {self.n_var})")
        object.__setattr__(self, "punctured", r)

    @classmethod
    def for_graph(cls, graph: TannerGraph, punctured: Iterable[int], restarts: int = 0):
        """Build a pattern and enforce ``|R| = N - k`` for this graph."""
        pattern = cls(tuple(punctured), graph.n_var, restarts)
        if len(pattern.punctured) != graph.n_chk:
            raise ValueError(
                f"pattern punctures {len(pattern.punctured)} bits, code needs exactly {graph.n_chk}"
            )
        return pattern

    @property
    def transmitted(self) -> tuple[int, ...]:
        r = set(self.punctured)
        return tuple(v for v in range(self.n_var) if v not in r)

    def to_dict(self) -> dict:
        return {
            "n_var": self.n_var,
            "punctured": list(self.punctured),
            "transmitted": list(self.transmitted),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PuncturePattern":
        pattern = cls(tuple(data["punctured"]), int(data["n_var"]), int(data.get("restarts", 0)))
        if "transmitted" in data and list(data["transmitted"]) != list(pattern.transmitted):
            raise ValueError("'transmitted' does not match the complement of 'punctured'")
        return pattern


@dataclass(frozen=True)
class ErasurePattern:
    """Transmitted positions a receiver lost for one codeword."""

    erased: frozenset[int]

    @classmethod
    def of(cls, pattern: PuncturePattern, positions: Iterable[int]) -> "ErasurePattern":
        erased = frozenset(int(v) for v in positions)
        stray = erased.intersection(pattern.punctured)
        if stray:
            raise ValueError(f"positions {sorted(stray)} are punctured, not transmitted")
        if any(v < 0 or v >= pattern.n_var for v in erased):
            raise ValueError("erased position out of range")
        return cls(erased)

    def __len__(self) -> int:
        return len(self.erased)


class PeelableSet:
    """A variable set with empty maximal stopping set, grown one variable at a time.

    Keeps, for every member, the check that resolves it in some valid peeling
    order. Testing a candidate ``v`` only re-peels the members whose resolving
    check depends on ``v``; every other member still peels in its old order, and
    peeling reaches the same residual in any order, so the answer equals a full
    re-peel of ``members + {v}``.
    """

    def __init__(self, graph: TannerGraph, members: Iterable[int] = ()):
        self.graph = graph
        self.resolved_by = np.full(graph.n_chk, -1, dtype=np.int64)
        self.check_of: dict[int, int] = {}
        schedule, residual = peel_schedule(graph, members)
        if residual:
            raise ValueError(f"initial set is not peelable; residual {sorted(residual)}")
        for v, c in schedule:
            self.resolved_by[c] = v
            self.check_of[v] = c

    def __len__(self) -> int:
        return len(self.check_of)

    def __contains__(self, v: int) -> bool:
        return v in self.check_of

    @property
    def members(self) -> frozenset[int]:
        return frozenset(self.check_of)

    def _trial(self, v: int):
        var_lists = self.graph._var_lists
        resolved_by = self.resolved_by
        blocked = {v}
        stack = [v]
        while stack:
            x = stack.pop()
            for c in var_lists[x]:
                w = int(resolved_by[c])
                if w >= 0 and w not in blocked:
                    blocked.add(w)
                    stack.append(w)
        schedule, residual = peel_schedule(self.graph, blocked)
        return blocked, schedule, residual

    def residual_with(self, v: int) -> frozenset[int]:
        """Maximal stopping set of ``members + {v}``."""
        if v in self.check_of:
            return frozenset()
        return self._trial(v)[2]

    def try_add(self, v: int) -> bool:
        """Add ``v`` if the enlarged set stays peelable."""
        if v in self.check_of:
            return True
        blocked, schedule, residual = self._trial(v)
        if residual:
            return False
        for w in blocked:
            c = self.check_of.pop(w, None)
            if c is not None:
                self.resolved_by[c] = -1
        for w, c in schedule:
            self.resolved_by[c] = w
            self.check_of[w] = c
        return True


def find_puncture_pattern(
    graph: TannerGraph, rng: np.random.Generator, max_restarts: int = 100
) -> PuncturePattern:
    """Greedy random search for R with ``|R| = N - k`` and an empty maximal stopping set.

    Each restart walks a fresh random permutation of the variables and keeps a
    candidate iff the enlarged set still peels completely. A rejected candidate
    stays rejected for the rest of the pass, since stopping sets only grow with
    the set.
    """
    target = graph.n_chk
    best = 0
    for attempt in range(max_restarts):
        grown = PeelableSet(graph)
        for v in rng.permutation(graph.n_var):
            grown.try_add(int(v))
            if len(grown) == target:
                return PuncturePattern.for_graph(graph, grown.members, restarts=attempt)
        best = max(best, len(grown))
    raise PatternNotFound(
        f"no peelable puncturing set of size {target} after {max_restarts} restarts "
        f"(largest found: {best}); try a degree distribution with more degree-2 variables"
    )


@dataclass(frozen=True)
class Certificate:
    size: int
    checked_extensions: int

    def __bool__(self) -> bool:
        return True


@dataclass(frozen=True)
class Violation:
    """First failed property: ``kind`` is ``size``, ``emptiness`` or ``maximality``."""

    kind: str
    message: str
    witness: Union[int, frozenset, None] = None

    def __bool__(self) -> bool:
        return False


def certify_pattern(graph: TannerGraph, pattern: PuncturePattern) -> Union[Certificate, Violation]:
    r = pattern.punctured
    if pattern.n_var != graph.n_var:
        return Violation("size", f"pattern is for {pattern.n_var} variables, graph has {graph.n_var}")
    if len(r) != graph.n_chk:
        return Violation(
            "size",
            f"|R| = {len(r)} but the code has N - k = {graph.n_chk}",
            witness=len(r),
        )
    _, residual = peel_schedule(graph, r)
    if residual:
        return Violation("emptiness", "maximal stopping set of R is nonempty", witness=residual)
    grown = PeelableSet(graph, r)
    checked = 0
    for v in pattern.transmitted:
        checked += 1
        if not grown.residual_with(v):
            return Violation(
                "maximality", f"R + {{{v}}} still peels completely", witness=v
            )
    return Certificate(size=len(r), checked_extensions=checked)


def residual_of(graph: TannerGraph, pattern: PuncturePattern, erased: Optional[Iterable[int]] = None):
    """Maximal stopping set of ``R`` plus extra erased transmitted positions."""
    extra = () if erased is None else erased
    return peel_schedule(graph, list(pattern.punctured) + list(extra))[1]
