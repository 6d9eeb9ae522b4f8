"""Command-line interface: coefficient dumps, factorizations, error sweeps,
band optimization, noise calibration, and noise/trajectory generation.

Exit status is 0 on success, 2 for usage errors (bad flags or flag
combinations), and 1 for computation errors.  All output is deterministic
for a fixed argv and seed.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from contextlib import contextmanager

import numpy as np

from . import factorization as fz
from . import metrics, noise, optimizer, sgd
from .privacy import PrivacyParams, calibrate_sigma
from .sensitivity import ParticipationSchema
from .toeplitz import r_sequence, r_tilde_sequence
from .workload import WorkloadParams, inv_sqrt_coeffs, sqrt_coeffs

SEED_ENV_VAR = "BISR_SEED"


class _Parser(argparse.ArgumentParser):
    """Argument parser that fails with a single-line diagnostic."""

    def error(self, message):
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(2)


@contextmanager
def _open_output(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            yield handle


def _resolve_seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get(SEED_ENV_VAR)
    return int(env) if env else 0


def _resolve_schema(parser: _Parser, n: int, k, b) -> ParticipationSchema:
    if k is None and b is None:
        parser.error("provide --k or --b (participation schema underdetermined)")
    if b is None:
        b = n // k
        if b < 1:
            parser.error(f"--k {k} exceeds the number of steps n={n}")
    if k is None:
        k = math.ceil(n / b)
    try:
        return ParticipationSchema(n=n, b=b, k=k)
    except ValueError as exc:
        parser.error(str(exc))


def _add_workload_flags(sub, with_n: bool = True):
    if with_n:
        sub.add_argument("--n", type=int, required=True, help="number of steps")
    sub.add_argument("--alpha", type=float, default=1.0, help="weight decay")
    sub.add_argument("--beta", type=float, default=0.0, help="momentum")


def _add_schema_flags(sub):
    sub.add_argument("--k", type=int, help="max participations (default ceil(n/b))")
    sub.add_argument("--b", type=int, help="min separation (default n//k)")


def _format_row(values) -> str:
    return ", ".join(format(float(v), ".12g") for v in values)


def _cmd_coeffs(parser, args) -> int:
    params = WorkloadParams(n=args.n, alpha=args.alpha, beta=args.beta)
    rows = [
        ("r", r_sequence(args.n)),
        ("r_tilde", r_tilde_sequence(args.n)),
        ("c", sqrt_coeffs(params)),
        ("c_tilde", inv_sqrt_coeffs(params)),
    ]
    with _open_output(args.output) as out:
        for name, values in rows:
            out.write(f"{name}: {_format_row(values)}\n")
    return 0


def _cmd_factorize(parser, args) -> int:
    params = WorkloadParams(n=args.n, alpha=args.alpha, beta=args.beta)
    if args.kind == "identity":
        result = fz.identity_factorization(params)
    else:
        if args.p is None:
            parser.error(f"--p is required for kind {args.kind}")
        builder = fz.bisr if args.kind == "bisr" else fz.bsr
        result = builder(params, args.p)
    with _open_output(args.output) as out:
        out.write(fz.to_json(result) + "\n")
    return 0


def _sweep_bandwidths(args, n: int, schema: ParticipationSchema) -> list[int]:
    if args.bandwidths:
        return [int(p) for p in args.bandwidths.split(",")]
    return metrics.bandwidth_grid(n, schema.b)


def _cmd_sweep(parser, args) -> int:
    kind = fz.FactorizationKind(args.kind)
    if args.vary == "bandwidth":
        if args.n is None:
            parser.error("bandwidth sweeps require --n")
        params = WorkloadParams(n=args.n, alpha=args.alpha, beta=args.beta)
        schema = _resolve_schema(parser, args.n, args.k, args.b)
        reports = metrics.rmse_bandwidth_sweep(
            params, schema, kind, _sweep_bandwidths(args, args.n, schema)
        )
        rows = [(params, r) for r in reports]
    else:
        if not args.n_grid:
            parser.error("--vary n requires --n-grid")
        if args.k is None:
            parser.error("--vary n requires --k")
        rows = []
        for n in (int(v) for v in args.n_grid.split(",")):
            params = WorkloadParams(n=n, alpha=args.alpha, beta=args.beta)
            schema = _resolve_schema(parser, n, args.k, None)
            if kind == fz.FactorizationKind.BISR:
                p = metrics.select_bandwidth(params, schema)
            else:
                p = min(schema.b, n)
            report = metrics.expected_error(
                fz.bisr(params, p) if kind == fz.FactorizationKind.BISR
                else fz.bsr(params, p),
                schema,
            )
            rows.append((params, report))
    with _open_output(args.output) as out:
        out.write(metrics.CSV_HEADER + "\n")
        for params, report in rows:
            out.write(metrics.sweep_csv_row(params, report) + "\n")
    return 0


def _cmd_optimize(parser, args) -> int:
    params = WorkloadParams(n=args.n, alpha=args.alpha, beta=args.beta)
    schema = _resolve_schema(parser, args.n, args.k, args.b)
    config = optimizer.OptimizerConfig(steps=args.steps)
    trace: list[optimizer.TraceEntry] = []
    result = optimizer.optimize_band(params, schema, args.p, config, trace)
    with _open_output(args.output) as out:
        out.write(fz.to_json(result) + "\n")
    if args.trace:
        with _open_output(args.trace) as out:
            optimizer.write_trace_csv(trace, out)
    return 0


def _cmd_calibrate(parser, args) -> int:
    pp = PrivacyParams(epsilon=args.eps, delta=args.delta, sensitivity=args.sens)
    sigma = calibrate_sigma(pp)
    with _open_output(args.output) as out:
        out.write(format(sigma, ".12g") + "\n")
    return 0


def _cmd_noise(parser, args) -> int:
    params = WorkloadParams(n=args.n, alpha=args.alpha, beta=args.beta)
    band = inv_sqrt_coeffs(params)[: args.p]
    block = noise.noise_offline(band, args.n, args.d, args.sigma, _resolve_seed(args))
    with _open_output(args.output) as out:
        out.write("step," + ",".join(f"z{i}" for i in range(args.d)) + "\n")
        for step in range(args.n):
            values = ",".join(format(v, ".17g") for v in block[step])
            out.write(f"{step},{values}\n")
    return 0


def _cmd_sgd(parser, args) -> int:
    params = WorkloadParams(n=args.n, alpha=args.alpha, beta=args.beta)
    band = inv_sqrt_coeffs(params)[: args.p]
    config = sgd.SgdConfig(
        dimension=args.d,
        steps=args.n,
        batch_size=args.batch_size,
        clip_norm=args.clip,
        learning_rate=args.lr,
        weight_decay=args.alpha,
        momentum=args.beta,
        noise_multiplier=args.sigma,
    )
    if args.task == "quadratic":
        task = sgd.QuadraticBowl()
        theta0 = np.full(args.d, 1.0)
    else:
        task = sgd.LinearRegressionTask(args.d, seed=_resolve_seed(args))
        theta0 = None
    result = sgd.dp_sgd_run(config, band, task, _resolve_seed(args), theta0=theta0)
    with _open_output(args.output) as out:
        sgd.write_trajectory_csv(result, out)
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="bisr", description=__doc__)
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("coeffs", help="print coefficient sequences")
    _add_workload_flags(sub)
    sub.add_argument("--output", help="output path, - for stdout")
    sub.set_defaults(func=_cmd_coeffs)

    sub = subs.add_parser("factorize", help="build a factorization as JSON")
    sub.add_argument("--kind", choices=["bisr", "bsr", "identity"], required=True)
    _add_workload_flags(sub)
    sub.add_argument("--p", type=int, help="bandwidth")
    sub.add_argument("--output", help="output path, - for stdout")
    sub.set_defaults(func=_cmd_factorize)

    sub = subs.add_parser("sweep", help="error sweeps as CSV")
    sub.add_argument("--kind", choices=["bisr", "bsr"], required=True)
    sub.add_argument("--vary", choices=["bandwidth", "n"], default="bandwidth")
    sub.add_argument("--n", type=int, help="number of steps (bandwidth sweeps)")
    sub.add_argument("--alpha", type=float, default=1.0)
    sub.add_argument("--beta", type=float, default=0.0)
    _add_schema_flags(sub)
    sub.add_argument("--bandwidths", help="comma-separated bandwidths")
    sub.add_argument("--n-grid", help="comma-separated n values for --vary n")
    sub.add_argument("--output", help="output path, - for stdout")
    sub.set_defaults(func=_cmd_sweep)

    sub = subs.add_parser("optimize", help="optimize the noising band")
    _add_workload_flags(sub)
    _add_schema_flags(sub)
    sub.add_argument("--p", type=int, required=True, help="bandwidth")
    sub.add_argument("--steps", type=int, default=20)
    sub.add_argument("--output", help="factorization JSON path, - for stdout")
    sub.add_argument("--trace", help="convergence trace CSV path")
    sub.set_defaults(func=_cmd_optimize)

    sub = subs.add_parser("calibrate", help="noise level for a privacy target")
    sub.add_argument("--eps", type=float, required=True)
    sub.add_argument("--delta", type=float, required=True)
    sub.add_argument("--sens", type=float, default=1.0)
    sub.add_argument("--output", help="output path, - for stdout")
    sub.set_defaults(func=_cmd_calibrate)

    sub = subs.add_parser("noise", help="correlated noise block as CSV")
    _add_workload_flags(sub)
    sub.add_argument("--d", type=int, required=True, help="vector dimension")
    sub.add_argument("--p", type=int, required=True, help="bandwidth")
    sub.add_argument("--sigma", type=float, default=1.0)
    sub.add_argument("--seed", type=int)
    sub.add_argument("--output", help="output path, - for stdout")
    sub.set_defaults(func=_cmd_noise)

    sub = subs.add_parser("sgd", help="private SGD trajectory as CSV")
    _add_workload_flags(sub)
    sub.add_argument("--d", type=int, required=True, help="parameter dimension")
    sub.add_argument("--p", type=int, required=True, help="bandwidth")
    sub.add_argument("--batch-size", type=int, default=1)
    sub.add_argument("--clip", type=float, default=1.0)
    sub.add_argument("--lr", type=float, default=0.1)
    sub.add_argument("--sigma", type=float, default=0.0)
    sub.add_argument("--task", choices=["quadratic", "linreg"], default="quadratic")
    sub.add_argument("--seed", type=int)
    sub.add_argument("--output", help="output path, - for stdout")
    sub.set_defaults(func=_cmd_sgd)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(parser, args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    except ValueError as exc:
        print(f"bisr: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
