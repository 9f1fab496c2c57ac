"""Experiment configuration and the analytic / Monte Carlo sweeps behind the CLI."""

from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass, field, fields
from typing import Iterator, Optional, Sequence

import numpy as np

from . import analysis
from .channel import ChannelParams, JointErasureDist, correlation_bounds, joint_from_rho
from .errors import (
    DegenerateMarginal,
    DimensionError,
    InfeasibleCorrelation,
    RetransmissionCapExceeded,
)
from .ldpc import DegreeSpec, PuncturePattern, random_ldpc, read_alist
from .protocol import (
    DEFAULT_MAX_RETX,
    CodecContext,
    PacketSet,
    build_context,
    decode_bob,
    decode_eve,
    encode_message,
    random_message,
    transmit_arq,
    trial_rng,
)
from .stats import binomial_gof, mean_se, proportion_se

OUT_DIR_ENV = "ERASURE_SECRECY_OUT"
DEFAULT_RHO_POINTS = 101
DEFAULT_EPSILONS = (0.3, 0.4, 0.5, 0.51, 0.6)

# Grid-index offset for the RNG stream that builds a code (scrambler, puncture search).
_CODE_STREAM = 2**31 - 1


@dataclass
class CodeSource:
    """Either an alist file (plus optional pattern JSON) or a generated code."""

    alist: Optional[str] = None
    pattern: Optional[str] = None
    N: Optional[int] = None
    k: Optional[int] = None
    degrees: str = "1:0.1,2:0.4,3:0.5"
    seed: int = 0
    avoid_4cycles: bool = False
    max_restarts: int = 100


@dataclass
class ExperimentConfig:
    eta: int = 5000
    alpha: int = 1
    L: int = 1
    k: Optional[int] = None
    beta: int = 50
    deltas: list = field(default_factory=lambda: [0.5])
    epsilons: list = field(default_factory=lambda: list(DEFAULT_EPSILONS))
    rho: str = "auto"
    trials: int = 100
    seed: int = 0
    max_retx: int = DEFAULT_MAX_RETX
    code: Optional[CodeSource] = None

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        data = dict(data)
        if data.get("code") is not None and not isinstance(data["code"], CodeSource):
            code_keys = {f.name for f in fields(CodeSource)}
            bad = set(data["code"]) - code_keys
            if bad:
                raise ValueError(f"unknown code keys: {sorted(bad)}")
            data["code"] = CodeSource(**data["code"])
        for key in ("deltas", "epsilons"):
            if key in data and not isinstance(data[key], (list, tuple)):
                data[key] = [data[key]]
        return cls(**data)

    @classmethod
    def load(cls, path: str) -> "ExperimentConfig":
        with open(path) as f:
            return cls.from_dict(json.load(f))

    def to_dict(self) -> dict:
        return asdict(self)

    @property
    def k_eff(self) -> int:
        return self.eta * self.alpha if self.k is None else self.k

    def validate(self) -> None:
        for name in ("eta", "alpha", "L", "trials", "max_retx"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")
        if not 1 <= self.beta <= self.eta * self.alpha:
            raise ValueError(f"beta must lie in [1, eta*alpha = {self.eta * self.alpha}]")
        if not self.deltas or not self.epsilons:
            raise ValueError("the channel grid needs at least one delta and one epsilon")
        for p in list(self.deltas) + list(self.epsilons):
            if not 0.0 <= float(p) <= 1.0:
                raise ValueError(f"erasure probability {p} outside [0, 1]")
        parse_rho_spec(self.rho)
        if self.code is not None:
            c = self.code
            if c.alist is None:
                if c.N is None or c.k is None:
                    raise ValueError("a generated code needs N and k")
                if not c.N > c.k >= 1:
                    raise ValueError(f"need N > k >= 1, got N={c.N}, k={c.k}")
                n = c.k
            else:
                n = None
            if n is not None and self.eta * self.alpha != n:
                raise DimensionError(f"eta * alpha = {self.eta * self.alpha} must equal n = k = {n}")


@dataclass(frozen=True)
class RhoSpec:
    kind: str  # "auto", "range" or "values"
    points: int = DEFAULT_RHO_POINTS
    lo: float = -1.0
    hi: float = 1.0
    values: tuple = ()


def parse_rho_spec(text) -> RhoSpec:
    """``auto[:N]``, ``range:LO:HI:N`` or ``values:R1,R2,...`` (a bare list means values)."""
    if isinstance(text, (int, float)):
        return RhoSpec("values", values=(float(text),))
    if isinstance(text, (list, tuple)):
        return RhoSpec("values", values=tuple(float(v) for v in text))
    text = (text or "").strip()
    if text in ("", "auto"):
        return RhoSpec("auto")
    head, _, rest = text.partition(":")
    if head == "auto":
        n = int(rest)
        if n < 1:
            raise ValueError("auto sweep needs at least one point")
        return RhoSpec("auto", points=n)
    if head == "range":
        lo, hi, n = rest.split(":")
        if int(n) < 1 or float(lo) > float(hi):
            raise ValueError(f"bad rho range {text!r}")
        return RhoSpec("range", points=int(n), lo=float(lo), hi=float(hi))
    if head == "values":
        rest_vals = rest
    else:
        rest_vals = text
    vals = tuple(float(v) for v in rest_vals.split(",") if v.strip())
    if not vals:
        raise ValueError(f"empty rho value list in {text!r}")
    return RhoSpec("values", values=vals)


@dataclass(frozen=True)
class GridPoint:
    index: int
    delta: float
    epsilon: float
    rho: float
    flag: str = ""


def _sweep(spec: RhoSpec, delta: float, epsilon: float) -> list[tuple[float, str]]:
    try:
        lo, hi = correlation_bounds(delta, epsilon)
    except DegenerateMarginal:
        if spec.kind == "values":
            return [(r, "" if r == 0.0 else "degenerate_marginal") for r in spec.values]
        return [(0.0, "")]
    if spec.kind == "auto":
        pts = np.linspace(lo, hi, spec.points) if spec.points > 1 else np.array([lo])
        return [(float(r), "") for r in pts]
    if spec.kind == "range":
        a, b = max(spec.lo, lo), min(spec.hi, hi)
        if a > b:
            return []
        pts = np.linspace(a, b, spec.points) if spec.points > 1 else np.array([a])
        return [(float(r), "") for r in pts]
    out = []
    for r in spec.values:
        try:
            ChannelParams(delta, epsilon, r)
            out.append((r, ""))
        except InfeasibleCorrelation:
            out.append((r, "infeasible_rho"))
    return out


def grid(cfg: ExperimentConfig) -> Iterator[GridPoint]:
    spec = parse_rho_spec(cfg.rho)
    idx = 0
    for delta in cfg.deltas:
        for epsilon in cfg.epsilons:
            for rho, flag in _sweep(spec, float(delta), float(epsilon)):
                yield GridPoint(idx, float(delta), float(epsilon), rho, flag)
                idx += 1


def channel_for(point: GridPoint) -> JointErasureDist:
    """Joint law at a grid point; degenerate marginals fall back to independence."""
    try:
        return joint_from_rho(ChannelParams(point.delta, point.epsilon, point.rho))
    except DegenerateMarginal:
        return JointErasureDist.independent(point.delta, point.epsilon)


# -- formatting ----------------------------------------------------------------


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        if math.isnan(value):
            return "nan"
        return f"{float(value):.12g}"
    return str(value)


ANALYZE_COLUMNS = ("index", "delta", "epsilon", "rho", "pr_ref", "expected_d", "pr_d_geq_beta", "flag")

SIMULATE_COLUMNS = (
    "index",
    "delta",
    "epsilon",
    "rho",
    "trials",
    "emp_pr_ref",
    "emp_pr_ref_se",
    "pr_ref",
    "emp_mean_d",
    "emp_mean_d_se",
    "expected_d",
    "emp_pr_d_geq_beta",
    "emp_pr_d_geq_beta_se",
    "pr_d_geq_beta",
    "chi2",
    "chi2_dof",
    "chi2_pvalue",
    "mean_transmissions",
    "bob_failures",
    "flag",
)


def analytic_values(point: GridPoint, eta: int, alpha: int, beta: int, k: int) -> dict:
    """Closed-form columns for one grid point; a failed evaluation is reported as a flag."""
    row = {"pr_ref": None, "expected_d": None, "pr_d_geq_beta": None, "flag": point.flag}
    if point.flag:
        return row
    try:
        p = analysis.pr_ref(point.delta, point.epsilon, point.rho)
    except (ValueError, InfeasibleCorrelation) as exc:
        row["flag"] = _flag_for(exc)
        return row
    row.update(
        pr_ref=p,
        expected_d=analysis.expected_d(k, p),
        pr_d_geq_beta=analysis.pr_d_geq(beta, eta, alpha, p),
    )
    return row


def _flag_for(exc: Exception) -> str:
    if isinstance(exc, InfeasibleCorrelation):
        return "infeasible_rho"
    return "undefined"


def analyze_rows(cfg: ExperimentConfig) -> list[dict]:
    cfg.validate()
    rows = []
    for pt in grid(cfg):
        row = {"index": pt.index, "delta": pt.delta, "epsilon": pt.epsilon, "rho": pt.rho}
        row.update(analytic_values(pt, cfg.eta, cfg.alpha, cfg.beta, cfg.k_eff))
        rows.append(row)
    return rows


# -- Monte Carlo ------------------------------------------------------------------


def load_code(cfg: ExperimentConfig) -> Optional[CodecContext]:
    """Codec for full-pipeline simulation, or None for packet-level simulation."""
    src = cfg.code
    if src is None:
        return None
    rng = trial_rng(cfg.seed, _CODE_STREAM)
    if src.alist is not None:
        h = read_alist(src.alist)
    else:
        h = random_ldpc(src.N, src.N - src.k, DegreeSpec.parse(src.degrees), np.random.default_rng(src.seed), src.avoid_4cycles)
    pattern = None
    if src.pattern is not None:
        with open(src.pattern) as f:
            pattern = PuncturePattern.from_dict(json.load(f))
    return build_context(h, cfg.eta, cfg.alpha, cfg.L, rng, pattern=pattern, max_restarts=src.max_restarts)


@dataclass
class PointSummary:
    missing: np.ndarray
    d: np.ndarray
    transmissions: np.ndarray
    bob_failures: int
    capped: int


def simulate_point(
    point: GridPoint, cfg: ExperimentConfig, ctx: Optional[CodecContext] = None
) -> PointSummary:
    dist = channel_for(point)
    missing, dvals, tx = [], [], []
    bob_failures = capped = 0
    blank = PacketSet(np.zeros((cfg.eta, cfg.alpha * cfg.L), dtype=np.uint8), cfg.alpha, cfg.L)
    for t in range(cfg.trials):
        rng = trial_rng(cfg.seed, point.index, t)
        if ctx is not None:
            msg = random_message(ctx, rng)
            packets = encode_message(ctx, msg)
        else:
            packets = blank
        try:
            res = transmit_arq(packets, dist, rng, cfg.max_retx)
        except RetransmissionCapExceeded:
            capped += 1
            continue
        if ctx is not None:
            if not np.array_equal(decode_bob(ctx, packets), msg):
                bob_failures += 1
            eve = decode_eve(ctx, packets.with_missing(res.eve_missing))
            if eve.d != res.d or set(eve.d_per_codeword) != {res.d}:
                bob_failures += 1
        missing.append(len(res.eve_missing))
        dvals.append(res.d)
        tx.append(res.transmissions)
    return PointSummary(np.array(missing), np.array(dvals), np.array(tx), bob_failures, capped)


def simulate_rows(cfg: ExperimentConfig, ctx: Optional[CodecContext] = None) -> list[dict]:
    cfg.validate()
    k = ctx.k if ctx is not None else cfg.k_eff
    rows = []
    for pt in grid(cfg):
        row = {"index": pt.index, "delta": pt.delta, "epsilon": pt.epsilon, "rho": pt.rho}
        analytic = analytic_values(pt, cfg.eta, cfg.alpha, cfg.beta, k)
        row.update(analytic)
        if analytic["pr_ref"] is None:
            # infeasible rho, or delta = 1 where ARQ never terminates
            rows.append(row)
            continue
        summ = simulate_point(pt, cfg, ctx)
        done = summ.missing.size
        row["trials"] = done
        flags = [analytic["flag"]] if analytic["flag"] else []
        if summ.capped:
            flags.append(f"retx_cap_exceeded:{summ.capped}")
        if done:
            tx_total = done * cfg.eta
            emp = 1.0 - summ.missing.sum() / tx_total
            mean_d, se_d = mean_se(summ.d)
            frac = float(np.mean(summ.d >= cfg.beta))
            row.update(
                emp_pr_ref=emp,
                emp_pr_ref_se=proportion_se(emp, tx_total),
                emp_mean_d=mean_d,
                emp_mean_d_se=se_d,
                emp_pr_d_geq_beta=frac,
                emp_pr_d_geq_beta_se=proportion_se(frac, done),
                mean_transmissions=float(summ.transmissions.mean()),
                bob_failures=summ.bob_failures,
            )
            if analytic["pr_ref"] is not None:
                gof = binomial_gof(summ.missing, cfg.eta, 1.0 - analytic["pr_ref"])
                row.update(chi2=gof.statistic, chi2_dof=gof.dof, chi2_pvalue=gof.pvalue)
        row["flag"] = ";".join(flags)
        rows.append(row)
    return rows


def write_csv(rows: Sequence[dict], columns: Sequence[str], stream) -> None:
    stream.write(",".join(columns) + "\n")
    for row in rows:
        stream.write(",".join(fmt(row.get(c)) for c in columns) + "\n")


def default_out_dir() -> Optional[str]:
    return os.environ.get(OUT_DIR_ENV) or None
