"""Closed-form secrecy quantities for the punctured-LDPC scheme with ARQ.

``pr_ref`` is the probability that Eve ends up with an error-free copy of a
given packet. The number of packets she misses is binomial, so the number of
bits she must guess, D, is alpha times a binomial variable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

from .channel import ChannelParams, _joint_probs, correlation_bounds

__all__ = [
    "SecrecyPoint",
    "pr_ref",
    "pr_ref_independent",
    "pr_ref_at_rho_min",
    "pr_ref_at_rho_max",
    "pr_d_geq",
    "expected_d",
    "rho_threshold",
    "secrecy_point",
]

RHO_TOL = 1e-6
MAX_BISECTIONS = 200


def _scale(delta: float, epsilon: float) -> float:
    return math.sqrt(delta * epsilon * (1.0 - delta) * (1.0 - epsilon))


def pr_ref(delta: float, epsilon: float, rho: float = 0.0) -> float:
    """Probability that Eve receives a packet error-free at least once.

    Raises ValueError for ``delta == 1`` (Bob never succeeds) and
    InfeasibleCorrelation when ``rho`` is outside the feasible range.
    """
    if not 0.0 <= delta < 1.0:
        raise ValueError(f"delta must lie in [0, 1), got {delta!r}")
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon must lie in [0, 1], got {epsilon!r}")
    if 0.0 < delta and 0.0 < epsilon < 1.0:
        _joint_probs(delta, epsilon, rho)
    # Degenerate marginals zero the correlation term, whatever rho is.
    value = (1.0 - epsilon) / (1.0 - epsilon * delta - rho * _scale(delta, epsilon))
    # rho already passed the feasibility check; any overshoot at the bounds is rounding
    return min(max(value, 0.0), 1.0)


def pr_ref_independent(delta: float, epsilon: float) -> float:
    return (1.0 - epsilon) / (1.0 - epsilon * delta)


def pr_ref_at_rho_min(delta: float, epsilon: float) -> float:
    """Eve's per-packet success at the most negative feasible correlation."""
    correlation_bounds(delta, epsilon)
    if delta + epsilon > 1.0:
        return (1.0 - epsilon) / (2.0 - delta - epsilon)
    return 1.0 - epsilon


def pr_ref_at_rho_max(delta: float, epsilon: float) -> float:
    correlation_bounds(delta, epsilon)
    return (1.0 - epsilon) / (1.0 - min(delta, epsilon))


def _binomial_lower_sum(count: int, trials: int, p_miss: float) -> float:
    """sum_{i < count} C(trials, i) p_miss^i (1 - p_miss)^(trials - i).

    Terms are built by a log-domain recurrence from ``i = 0`` and added with
    ``math.fsum``.
    """
    if count <= 0:
        return 0.0
    if p_miss <= 0.0:
        return 1.0
    if p_miss >= 1.0:
        return 1.0 if count > trials else 0.0
    log_q = math.log(p_miss)
    log_p = math.log1p(-p_miss)
    log_term = trials * log_p
    terms = [math.exp(log_term)]
    for i in range(1, min(count, trials + 1)):
        log_term += math.log((trials - i + 1) / i) + log_q - log_p
        terms.append(math.exp(log_term))
    return math.fsum(terms)


def pr_d_geq(beta: int, eta: int, alpha: int, pr_ref: float) -> float:
    """Pr(D >= beta) for ``eta`` packets carrying ``alpha`` bits per codeword."""
    if int(beta) != beta or not 1 <= beta <= alpha * eta:
        raise ValueError(f"beta must be an integer in [1, {alpha * eta}], got {beta!r}")
    if not 0.0 <= pr_ref <= 1.0:
        raise ValueError(f"pr_ref must lie in [0, 1], got {pr_ref!r}")
    packets_needed = -(-int(beta) // alpha)
    lower = _binomial_lower_sum(packets_needed, eta, 1.0 - pr_ref)
    return min(max(1.0 - lower, 0.0), 1.0)


def expected_d(k: int, pr_ref: float) -> float:
    if not 0.0 <= pr_ref <= 1.0:
        raise ValueError(f"pr_ref must lie in [0, 1], got {pr_ref!r}")
    return (1.0 - pr_ref) * k


def _bisect_crossing(
    f: Callable[[float], float], lo: float, hi: float, target: float, tol: float, max_iter: int
) -> Optional[float]:
    """Crossing of a nonincreasing ``f`` through ``target`` on [lo, hi], or None."""
    if not hi > lo:
        return None
    f_lo, f_hi = f(lo), f(hi)
    if not (f_lo >= target >= f_hi) or f_lo == f_hi:
        return None
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if f(mid) >= target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def rho_threshold(
    beta: int,
    eta: int,
    alpha: int,
    delta: float,
    epsilon: float,
    target: float = 0.5,
    interval: Optional[tuple[float, float]] = None,
    tol: float = RHO_TOL,
    max_iter: int = MAX_BISECTIONS,
) -> Optional[float]:
    """Correlation at which Pr(D >= beta) falls through ``target``.

    Searches the feasible correlation range, or ``interval`` when given.
    Returns None when the probability stays on one side of ``target``.
    """
    if not 0.0 < target < 1.0:
        raise ValueError("target must lie strictly between 0 and 1")
    lo, hi = correlation_bounds(delta, epsilon)
    if interval is not None:
        lo, hi = max(lo, interval[0]), min(hi, interval[1])

    def prob(rho: float) -> float:
        return pr_d_geq(beta, eta, alpha, pr_ref(delta, epsilon, rho))

    return _bisect_crossing(prob, lo, hi, target, tol, max_iter)


@dataclass(frozen=True)
class SecrecyPoint:
    params: ChannelParams
    eta: int
    alpha: int
    k: int
    beta: int
    pr_ref: float
    expected_d: float
    pr_d_geq_beta: float


def secrecy_point(params: ChannelParams, eta: int, alpha: int, beta: int, k: Optional[int] = None) -> SecrecyPoint:
    """All analytic quantities at one channel operating point. ``k`` defaults to eta*alpha."""
    k = eta * alpha if k is None else k
    p = pr_ref(params.delta, params.epsilon, params.rho)
    return SecrecyPoint(
        params=params,
        eta=eta,
        alpha=alpha,
        k=k,
        beta=beta,
        pr_ref=p,
        expected_d=expected_d(k, p),
        pr_d_geq_beta=pr_d_geq(beta, eta, alpha, p),
    )
