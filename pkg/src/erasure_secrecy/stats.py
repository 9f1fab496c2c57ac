"""Summary statistics for Monte Carlo runs."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats as _st


@dataclass(frozen=True)
class GoodnessOfFit:
    statistic: float
    dof: int
    pvalue: float
    bins: int


def _pool(expected: np.ndarray, observed: np.ndarray, min_expected: float):
    """Merge adjacent bins until every bin expects at least ``min_expected`` counts."""
    exp_out, obs_out = [], []
    acc_e = acc_o = 0.0
    for e, o in zip(expected, observed):
        acc_e += e
        acc_o += o
        if acc_e >= min_expected:
            exp_out.append(acc_e)
            obs_out.append(acc_o)
            acc_e = acc_o = 0.0
    if acc_e > 0 or acc_o > 0:
        if exp_out:
            exp_out[-1] += acc_e
            obs_out[-1] += acc_o
        else:
            exp_out.append(acc_e)
            obs_out.append(acc_o)
    return np.array(exp_out), np.array(obs_out)


def binomial_gof(samples, n: int, p: float, min_expected: float = 5.0) -> GoodnessOfFit:
    """Pearson chi-square test of integer samples against Binomial(n, p)."""
    samples = np.asarray(samples, dtype=np.int64)
    t = samples.size
    support = np.arange(n + 1)
    expected = t * _st.binom.pmf(support, n, p)
    observed = np.bincount(samples, minlength=n + 1)[: n + 1].astype(float)
    exp_b, obs_b = _pool(expected, observed, min_expected)
    if exp_b.size < 2:
        return GoodnessOfFit(0.0, 0, 1.0, int(exp_b.size))
    stat = float(np.sum((obs_b - exp_b) ** 2 / exp_b))
    dof = exp_b.size - 1
    return GoodnessOfFit(stat, dof, float(_st.chi2.sf(stat, dof)), int(exp_b.size))


def proportion_se(p_hat: float, n: int) -> float:
    return math.sqrt(max(p_hat * (1.0 - p_hat), 0.0) / n) if n else float("nan")


def mean_se(values) -> tuple[float, float]:
    arr = np.asarray(values, dtype=float)
    if arr.size < 2:
        return float(arr.mean()) if arr.size else float("nan"), float("nan")
    return float(arr.mean()), float(arr.std(ddof=1) / math.sqrt(arr.size))
