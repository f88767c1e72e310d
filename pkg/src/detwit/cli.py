"""Command-line entry point: ``detwit <command> ...``.

Exit codes: 0 success, 1 negative finding, 2 input error, 3 shape mismatch,
4 infeasible instance, 5 partial result.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import constructions as cons
from .analysis import curve_csv, find_bit_decomposition, randomness_curve, RANK_TOL
from .optimize import (
    InfeasibleError,
    OptimizerConfig,
    maximize_witness_classical_bruteforce,
    maximize_witness_classical_seesaw,
    maximize_witness_quantum,
)
from .scenario import Behavior, apply_noise, behavior_from_classical, behavior_from_quantum
from .witness import witness_relabeling_scan, witness_value

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_SHAPE, EXIT_INFEASIBLE, EXIT_PARTIAL = range(6)

log = logging.getLogger("detwit")


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse exits 2 already; keep the message terse
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


def parse_grid(spec: str) -> list[float]:
    """``start:stop:count`` (inclusive, linear), a comma list, or a single value."""
    try:
        if ":" in spec:
            start, stop, count = spec.split(":")
            n = int(count)
            if n < 1:
                raise ValueError
            return [float(v) for v in np.linspace(float(start), float(stop), n)]
        return [float(v) for v in spec.split(",") if v.strip()]
    except ValueError:
        raise InputError(f"malformed grid {spec!r}") from None


def _load_behavior(path: str) -> Behavior:
    try:
        with open(path, encoding="utf-8") as fh:
            return Behavior.from_dict(json.load(fh))
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise InputError(f"cannot read behavior from {path}: {exc}") from None


def _emit(data: object) -> None:
    print(json.dumps(data, indent=2))


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def cmd_witness(args: argparse.Namespace) -> int:
    behavior = _load_behavior(args.input)
    k = args.k
    shape = (behavior.num_preparations, behavior.num_measurements)
    if k < 1 or shape != (2 * k, k):
        print(f"error: W_{k} needs a {2 * k}x{k} behavior, got {shape[0]}x{shape[1]}", file=sys.stderr)
        return EXIT_SHAPE
    if args.relabelings:
        if k != 2:
            print("error: --relabelings is only defined for k=2", file=sys.stderr)
            return EXIT_SHAPE
        report = witness_relabeling_scan(behavior)
    else:
        report = witness_value(behavior, k)
    _emit(report.to_dict())
    return EXIT_OK


def cmd_optimize(args: argparse.Namespace) -> int:
    cfg = OptimizerConfig(
        restarts=args.restarts, max_iterations=args.max_iterations, seed=args.seed, threads=args.threads
    )
    if args.brute_force:
        if args.kind != "classical":
            raise InputError("--brute-force applies to --kind classical only")
        try:
            result = maximize_witness_classical_bruteforce(args.d, args.k)
        except InfeasibleError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INFEASIBLE
    elif args.kind == "quantum":
        result = maximize_witness_quantum(args.d, args.k, cfg)
    else:
        result = maximize_witness_classical_seesaw(args.d, args.k, cfg)
    out = result.to_dict()
    out = {"kind": args.kind, "d": args.d, "k": args.k, **out}
    _emit(out)
    return EXIT_OK


def cmd_noise_scan(args: argparse.Namespace) -> int:
    behavior = _load_behavior(args.input)
    etas = parse_grid(args.eta_grid)
    if not etas or any(not 0 <= e <= 1 for e in etas):
        raise InputError("eta values must lie in [0, 1]")
    y = behavior.num_measurements
    pn = parse_grid(args.pn) if args.pn else [0.5] * y
    if len(pn) != y or any(not 0 <= v <= 1 for v in pn):
        raise InputError(f"--pn needs {y} values in [0, 1]")
    k = args.k or y
    if (behavior.num_preparations, y) != (2 * k, k):
        print("error: behavior shape does not fit W_k", file=sys.stderr)
        return EXIT_SHAPE
    clean = witness_value(behavior, k).value
    lines = ["eta,witness,ratio"]
    for eta in etas:
        w = witness_value(apply_noise(behavior, eta, pn), k).value
        denom = eta**k * clean
        ratio = w / denom if denom > 0 else math.nan
        lines.append(f"{_fmt(eta)},{_fmt(w)},{_fmt(ratio)}")
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_randomness_curve(args: argparse.Namespace) -> int:
    grid = parse_grid(args.q_grid)
    if not grid or any(not 0 < q <= 1 for q in grid):
        raise InputError("Q values must lie in (0, 1]")
    grid = sorted(grid)
    cfg = OptimizerConfig(
        restarts=args.restarts, max_iterations=args.max_iterations, seed=args.seed, threads=args.threads
    )
    curve = randomness_curve(grid, cfg)
    text = curve_csv(curve.points)
    raw_text = curve_csv(curve.raw)
    if args.out:
        out = Path(args.out)
        out.write_text(text, encoding="utf-8")
        out.with_name(out.stem + ".raw.csv").write_text(raw_text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if curve.partial:
        print(f"warning: constraint not met at Q = {curve.failed}; output is partial", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


CONSTRUCTIONS = ("bb84", "classical-identity", "correlated-mixture", "mub", "gellmann-parallel", "hadamard-classical")


def cmd_construct(args: argparse.Namespace) -> int:
    name = args.name
    try:
        if name == "correlated-mixture":
            if args.emit == "strategy":
                raise InputError("correlated-mixture exists only as a behavior; use --emit behavior")
            _emit(cons.correlated_mixture_behavior().to_dict())
            return EXIT_OK
        if name == "bb84":
            strategy = cons.bb84_strategy(args.theta)
        elif name == "classical-identity":
            strategy = cons.classical_identity_strategy(_need(args.k, "--k"))
        elif name == "mub":
            strategy = cons.mub_strategy(_need(args.d, "--d"), _need(args.k, "--k"))
        elif name == "gellmann-parallel":
            strategy = cons.parallel_gellmann_strategy(_need(args.d, "--d"), _need(args.k, "--k"))
        else:
            strategy = cons.classical_hadamard_strategy()
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if args.emit == "behavior":
        behavior = (
            behavior_from_quantum(strategy) if hasattr(strategy, "states") else behavior_from_classical(strategy)
        )
        _emit(behavior.to_dict())
    else:
        _emit(strategy.to_dict())
    return EXIT_OK


def _need(value: int | None, flag: str) -> int:
    if value is None:
        raise InputError(f"{flag} is required for this construction")
    return value


def cmd_decompose(args: argparse.Namespace) -> int:
    behavior = _load_behavior(args.input)
    result = find_bit_decomposition(behavior, args.tol)
    _emit(result.to_dict())
    return EXIT_OK if result.found else EXIT_NEGATIVE


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="detwit", description="Determinant dimension witnesses for prepare-and-measure data.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log diagnostics to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def optimizer_flags(p: argparse.ArgumentParser, restarts: int, max_iterations: int) -> None:
        p.add_argument("--restarts", type=int, default=restarts)
        p.add_argument("--max-iterations", type=int, default=max_iterations)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--threads", type=int, default=os.cpu_count() or 1)

    p = sub.add_parser("witness", help="evaluate W_k on a behavior file")
    p.add_argument("input")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--relabelings", action="store_true")
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("optimize", help="maximise W_k over d-dimensional strategies")
    p.add_argument("--kind", choices=("quantum", "classical"), required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--brute-force", action="store_true")
    optimizer_flags(p, 20, 500)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("noise-scan", help="witness under preparation-independent noise")
    p.add_argument("input")
    p.add_argument("--eta-grid", required=True)
    p.add_argument("--pn", help="comma-separated p_N(y); default 0.5 each")
    p.add_argument("--k", type=int)
    p.set_defaults(func=cmd_noise_scan)

    p = sub.add_parser("randomness-curve", help="certifiable min-entropy versus W_2")
    p.add_argument("--q-grid", required=True)
    p.add_argument("--out")
    optimizer_flags(p, 16, 4000)
    p.set_defaults(func=cmd_randomness_curve)

    p = sub.add_parser("construct", help="emit a named strategy or behavior")
    p.add_argument("--name", choices=CONSTRUCTIONS, required=True)
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--d", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--emit", choices=("strategy", "behavior"), default="strategy")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("decompose", help="look for a classical-bit model of a behavior")
    p.add_argument("input")
    p.add_argument("--tol", type=float, default=RANK_TOL)
    p.set_defaults(func=cmd_decompose)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
