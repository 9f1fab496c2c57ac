"""Correlated erasure indicators for the main (Bob) and wiretap (Eve) channels.

Each packet transmission produces a pair ``(e_m, e_w)`` of Bernoulli erasure
indicators, 1 meaning erased. The pair is memoryless across transmissions but
correlated within a transmission.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateMarginal, InfeasibleCorrelation

__all__ = [
    "FEASIBILITY_TOL",
    "ChannelParams",
    "JointErasureDist",
    "correlation_bounds",
    "joint_from_rho",
    "pearson_rho",
    "sample_pair",
    "sample_pairs",
]

# Slack allowed on p_ij before a correlation is declared infeasible. Values at the
# exact correlation bounds land within rounding of 0 and are clamped.
FEASIBILITY_TOL = 1e-9


def _check_marginals(delta: float, epsilon: float) -> None:
    for name, p in (("delta", delta), ("epsilon", epsilon)):
        if not 0.0 < p < 1.0:
            raise DegenerateMarginal(
                f"{name}={p!r}: correlation needs an erasure probability strictly inside (0, 1)"
            )


def _scale(delta: float, epsilon: float) -> float:
    return math.sqrt(delta * epsilon * (1.0 - delta) * (1.0 - epsilon))


def correlation_bounds(delta: float, epsilon: float) -> tuple[float, float]:
    """Feasible range of the Pearson correlation between the two erasure indicators."""
    _check_marginals(delta, epsilon)
    s = _scale(delta, epsilon)
    prod = delta * epsilon
    lo = (max(delta + epsilon - 1.0, 0.0) - prod) / s
    hi = (min(delta, epsilon) - prod) / s
    return lo, hi


@dataclass(frozen=True)
class JointErasureDist:
    """Joint law of ``(e_m, e_w)``; ``p10`` is Pr(Bob erased, Eve not erased)."""

    p00: float
    p01: float
    p10: float
    p11: float

    def __post_init__(self):
        probs = (self.p00, self.p01, self.p10, self.p11)
        if any(not 0.0 <= p <= 1.0 for p in probs):
            raise ValueError(f"probabilities must lie in [0, 1], got {probs}")
        if abs(math.fsum(probs) - 1.0) > 1e-12:
            raise ValueError(f"probabilities must sum to 1, got {math.fsum(probs)!r}")

    @classmethod
    def independent(cls, delta: float, epsilon: float) -> "JointErasureDist":
        """Product law. Also accepts the degenerate marginals 0 and 1."""
        if not (0.0 <= delta <= 1.0 and 0.0 <= epsilon <= 1.0):
            raise ValueError("erasure probabilities must lie in [0, 1]")
        p11 = delta * epsilon
        p10 = delta - p11
        p01 = epsilon - p11
        return cls(1.0 - p01 - p10 - p11, p01, p10, p11)

    @property
    def delta(self) -> float:
        return self.p10 + self.p11

    @property
    def epsilon(self) -> float:
        return self.p01 + self.p11

    @property
    def cdf(self) -> tuple[float, float, float]:
        """Cut points for outcomes ordered (0,0), (0,1), (1,0), (1,1)."""
        c1 = self.p00
        c2 = c1 + self.p01
        c3 = c2 + self.p10
        return c1, c2, c3


@dataclass(frozen=True)
class ChannelParams:
    delta: float
    epsilon: float
    rho: float = 0.0

    def __post_init__(self):
        _check_marginals(self.delta, self.epsilon)
        # Raises InfeasibleCorrelation when rho is out of range.
        _joint_probs(self.delta, self.epsilon, self.rho)

    @property
    def bounds(self) -> tuple[float, float]:
        return correlation_bounds(self.delta, self.epsilon)


def _joint_probs(delta: float, epsilon: float, rho: float) -> tuple[float, float, float, float]:
    p11 = rho * _scale(delta, epsilon) + delta * epsilon
    p10 = delta - p11
    p01 = epsilon - p11
    p00 = 1.0 - p01 - p10 - p11
    raw = (p00, p01, p10, p11)
    if any(p < -FEASIBILITY_TOL or p > 1.0 + FEASIBILITY_TOL for p in raw):
        lo, hi = correlation_bounds(delta, epsilon)
        raise InfeasibleCorrelation(
            f"rho={rho!r} is outside the feasible range [{lo:.6g}, {hi:.6g}] "
            f"for delta={delta!r}, epsilon={epsilon!r}"
        )
    p11 = min(max(p11, 0.0), 1.0)
    p10 = min(max(p10, 0.0), 1.0)
    p01 = min(max(p01, 0.0), 1.0)
    p00 = min(max(1.0 - p01 - p10 - p11, 0.0), 1.0)
    return p00, p01, p10, p11


def joint_from_rho(params: ChannelParams) -> JointErasureDist:
    return JointErasureDist(*_joint_probs(params.delta, params.epsilon, params.rho))


def pearson_rho(dist: JointErasureDist) -> float:
    """Correlation coefficient recovered from a joint law."""
    delta, epsilon = dist.delta, dist.epsilon
    _check_marginals(delta, epsilon)
    return (dist.p11 - delta * epsilon) / _scale(delta, epsilon)


def _decode_outcome(idx):
    return idx >> 1, idx & 1


def sample_pair(dist: JointErasureDist, rng: np.random.Generator) -> tuple[int, int]:
    """One transmission: returns ``(e_m, e_w)`` from a single uniform draw."""
    u = rng.random()
    idx = sum(1 for c in dist.cdf if c <= u)
    return _decode_outcome(idx)


def sample_pairs(
    dist: JointErasureDist, rng: np.random.Generator, size: int
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised :func:`sample_pair`: ``size`` transmissions, one uniform each."""
    u = rng.random(size)
    idx = np.searchsorted(np.asarray(dist.cdf), u, side="right")
    e_m, e_w = _decode_outcome(idx)
    return e_m.astype(np.uint8), e_w.astype(np.uint8)
