"""Command-line driver.

Subcommands: ``bounds``, ``analyze``, ``simulate``, ``codegen`` and ``certify``.
Exit codes: 0 success, 1 internal error, 2 invalid input.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import os
import platform
import sys
import time
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .channel import correlation_bounds
from .errors import DegenerateMarginal, DimensionError, InvalidPattern, PatternNotFound, SecrecyError
from .experiment import (
    ANALYZE_COLUMNS,
    SIMULATE_COLUMNS,
    ExperimentConfig,
    analyze_rows,
    default_out_dir,
    load_code,
    simulate_rows,
    write_csv,
)
from .ldpc import (
    AlistError,
    DegreeSpec,
    PuncturePattern,
    TannerGraph,
    certify_pattern,
    find_puncture_pattern,
    random_ldpc,
    read_alist,
    write_alist,
)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_INVALID = 2


class InputError(Exception):
    pass


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _emit_json(obj, args) -> None:
    json.dump(obj, sys.stdout, indent=2 if not getattr(args, "compact", False) else None)
    sys.stdout.write("\n")


# -- bounds -------------------------------------------------------------------


def cmd_bounds(args) -> int:
    lo, hi = correlation_bounds(args.delta, args.epsilon)
    d, e = args.delta, args.epsilon
    out = {
        "delta": d,
        "epsilon": e,
        "rho_min": lo,
        "rho_max": hi,
        "p11_min": max(d + e - 1.0, 0.0),
        "p11_max": min(d, e),
    }
    if args.json:
        _emit_json(out, args)
    else:
        print(f"rho in [{lo:.6g}, {hi:.6g}]")
        print(f"p11 in [{out['p11_min']:.6g}, {out['p11_max']:.6g}]")
    return EXIT_OK


# -- config handling ---------------------------------------------------------------


def _config_from_args(args, command: str) -> ExperimentConfig:
    data: dict = {}
    if args.config:
        with open(args.config) as f:
            data = json.load(f)
    if command == "simulate":
        data.setdefault("rho", "values:0")
    overrides = {
        "eta": args.eta,
        "alpha": args.alpha,
        "L": getattr(args, "L", None),
        "k": args.k,
        "beta": args.beta,
        "deltas": _floats(args.delta) if args.delta else None,
        "epsilons": _floats(args.epsilon) if args.epsilon else None,
        "rho": args.rho,
        "trials": getattr(args, "trials", None),
        "seed": args.seed,
        "max_retx": getattr(args, "max_retx", None),
    }
    data.update({k: v for k, v in overrides.items() if v is not None})
    code_over = {
        "alist": getattr(args, "alist", None),
        "pattern": getattr(args, "pattern", None),
        "N": getattr(args, "code_N", None),
        "k": getattr(args, "code_k", None),
        "degrees": getattr(args, "degrees", None),
        "seed": getattr(args, "code_seed", None),
    }
    code_over = {k: v for k, v in code_over.items() if v is not None}
    if code_over:
        code = dict(data.get("code") or {})
        code.update(code_over)
        data["code"] = code
    cfg = ExperimentConfig.from_dict(data)
    cfg.validate()
    return cfg


@contextlib.contextmanager
def _output(path: Optional[str], default_name: str):
    if path is None:
        out_dir = default_out_dir()
        if out_dir:
            os.makedirs(out_dir, exist_ok=True)
            path = os.path.join(out_dir, default_name)
    if path is None or path == "-":
        yield sys.stdout, None
        return
    with open(path, "w", newline="") as f:
        yield f, path


def _write_manifest(csv_path: Optional[str], command: str, cfg: ExperimentConfig, started: float, extra=None):
    if csv_path is None:
        return
    manifest = {
        "command": command,
        "config": cfg.to_dict(),
        "seed": cfg.seed,
        "versions": {
            "erasure_secrecy": __version__,
            "numpy": np.__version__,
            "python": platform.python_version(),
        },
        "wall_time_s": round(time.time() - started, 3),
        "output": os.path.abspath(csv_path),
    }
    if extra:
        manifest.update(extra)
    root, _ = os.path.splitext(csv_path)
    with open(root + ".manifest.json", "w") as f:
        json.dump(manifest, f, indent=2)
        f.write("\n")


def cmd_analyze(args) -> int:
    started = time.time()
    cfg = _config_from_args(args, "analyze")
    rows = analyze_rows(cfg)
    with _output(args.out, "analyze.csv") as (stream, path):
        write_csv(rows, ANALYZE_COLUMNS, stream)
    _write_manifest(path, "analyze", cfg, started, {"rows": len(rows)})
    return EXIT_OK


def cmd_simulate(args) -> int:
    started = time.time()
    cfg = _config_from_args(args, "simulate")
    ctx = load_code(cfg)
    rows = simulate_rows(cfg, ctx)
    with _output(args.out, "simulate.csv") as (stream, path):
        write_csv(rows, SIMULATE_COLUMNS, stream)
    _write_manifest(path, "simulate", cfg, started, {"rows": len(rows), "mode": "codec" if ctx else "packet"})
    return EXIT_OK


# -- codes -------------------------------------------------------------------------


def cmd_codegen(args) -> int:
    if not args.N > args.k >= 1:
        raise InputError(f"need N > k >= 1, got N={args.N}, k={args.k}")
    spec = DegreeSpec.parse(args.degrees)
    rng = np.random.default_rng(args.seed)
    h = random_ldpc(args.N, args.N - args.k, spec, rng, avoid_4cycles=args.avoid_4cycles)
    graph = TannerGraph(h)
    try:
        pattern = find_puncture_pattern(graph, rng, max_restarts=args.max_restarts)
    except PatternNotFound as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(
            "hint: a full-size pattern needs variable nodes of degree 1 and 2; "
            "try e.g. --degrees 1:0.1,2:0.4,3:0.5",
            file=sys.stderr,
        )
        return EXIT_INVALID
    verdict = certify_pattern(graph, pattern)
    if not verdict:
        print(f"internal error: search returned an uncertified pattern ({verdict.message})", file=sys.stderr)
        return EXIT_INTERNAL
    out_dir = args.out_dir or default_out_dir() or "."
    os.makedirs(out_dir, exist_ok=True)
    stem = args.name or f"code_N{args.N}_k{args.k}_s{args.seed}"
    alist_path = os.path.join(out_dir, stem + ".alist")
    pattern_path = os.path.join(out_dir, stem + ".pattern.json")
    write_alist(h, alist_path)
    with open(pattern_path, "w") as f:
        payload = pattern.to_dict()
        payload.update(restarts=pattern.restarts, degrees=str(spec), seed=args.seed)
        json.dump(payload, f)
        f.write("\n")
    print(f"wrote {alist_path}")
    print(f"wrote {pattern_path}")
    print(f"certified |R| = {len(pattern.punctured)} after {pattern.restarts} restart(s)")
    return EXIT_OK


def cmd_certify(args) -> int:
    h = read_alist(args.alist)
    with open(args.pattern) as f:
        pattern = PuncturePattern.from_dict(json.load(f))
    verdict = certify_pattern(TannerGraph(h), pattern)
    if args.json:
        if verdict:
            _emit_json({"certified": True, "size": verdict.size, "checked_extensions": verdict.checked_extensions}, args)
        else:
            witness = verdict.witness
            if isinstance(witness, frozenset):
                witness = sorted(witness)
            _emit_json({"certified": False, "kind": verdict.kind, "message": verdict.message, "witness": witness}, args)
    elif verdict:
        print(f"certified: |R| = {verdict.size}, {verdict.checked_extensions} extensions checked")
    else:
        print(f"violation ({verdict.kind}): {verdict.message}")
    return EXIT_OK if verdict else EXIT_INVALID


# -- parser ------------------------------------------------------------------------


def _add_grid_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("--eta", type=int, help="packets per block")
    p.add_argument("--alpha", type=int, help="bits per codeword per packet")
    p.add_argument("--k", type=int, help="code dimension for E[D] (default eta*alpha)")
    p.add_argument("--beta", type=int, help="degrees-of-freedom target")
    p.add_argument("--delta", help="comma-separated erasure probabilities for Bob")
    p.add_argument("--epsilon", help="comma-separated erasure probabilities for Eve")
    p.add_argument(
        "--rho",
        help="correlation sweep: auto[:N] (default, N=101), range:LO:HI:N, or values:R1,R2",
    )
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--out", help="CSV output path ('-' for stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="erasure-secrecy",
        description="Secrecy of punctured LDPC codes with ARQ over correlated erasure channels.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", help="feasible correlation range for (delta, epsilon)")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("analyze", help="closed-form sweep over the channel grid")
    _add_grid_args(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="Monte Carlo sweep with analytic columns alongside")
    _add_grid_args(p)
    p.add_argument("--L", type=int, help="codewords per block")
    p.add_argument("--trials", type=int)
    p.add_argument("--max-retx", dest="max_retx", type=int)
    p.add_argument("--alist", help="run the full codec with this parity-check matrix")
    p.add_argument("--pattern", help="certified puncturing pattern JSON for --alist")
    p.add_argument("--code-N", dest="code_N", type=int, help="generate a code of this length")
    p.add_argument("--code-k", dest="code_k", type=int, help="dimension of the generated code")
    p.add_argument("--degrees", help="variable degree spec for the generated code")
    p.add_argument("--code-seed", dest="code_seed", type=int)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("codegen", help="random LDPC code plus a certified puncturing pattern")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--degrees", default="1:0.1,2:0.4,3:0.5", help="e.g. '3' or '1:0.1,2:0.4,3:0.5'")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-restarts", dest="max_restarts", type=int, default=100)
    p.add_argument("--avoid-4cycles", dest="avoid_4cycles", action="store_true")
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--name", help="file stem for the outputs")
    p.set_defaults(func=cmd_codegen)

    p = sub.add_parser("certify", help="check a puncturing pattern against a code")
    p.add_argument("--alist", required=True)
    p.add_argument("--pattern", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_certify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (
        InputError,
        DegenerateMarginal,
        DimensionError,
        InvalidPattern,
        AlistError,
        ValueError,
        FileNotFoundError,
        json.JSONDecodeError,
    ) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SecrecyError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
