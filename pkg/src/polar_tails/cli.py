"""Command-line front end: ``polar-tails <command> --config FILE [--out PATH] [--seed N]``.

Exit codes: 0 success, 1 a validate check failed, 2 configuration or data error,
3 numeric failure.
"""
from __future__ import annotations

import argparse
import math
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import List, Optional

from . import __version__
from . import asymptotics as asy
from . import estimation, polar_exact, sampling, validation
from .config import Config, build_model
from .csvio import write_csv
from .errors import ConfigError, InsufficientDataError, QuadratureError

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3
DEFAULT_SEED = 20240101


def _map_ordered(fn, items):
    items = list(items)
    workers = min(len(items), sampling.worker_count())
    if workers <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _ratio_from_logs(log_num: float, log_den: float) -> float:
    return math.exp(log_num - log_den) if math.isfinite(log_num) and math.isfinite(log_den) else math.nan


def _exp_or_zero(log_value: float) -> float:
    return math.exp(log_value) if log_value > -745.0 else 0.0


# -- commands ------------------------------------------------------------------------


def cmd_tail_table(cfg: Config, out, seed: Optional[int]) -> int:
    model = build_model(cfg)
    u_grid = cfg.get_grid("u_grid")
    if u_grid[0] <= 0:
        raise ConfigError("u_grid values must be positive")

    def row(u):
        t = float(model.radial.t(u))
        exact = polar_exact.log_survivor_x(model, u)
        thm1 = asy.thm1_log_survivor_approx(model, u)
        thm3 = asy.thm3_log_survivor_approx(model, u)
        thm3_strict = asy.thm3_log_survivor_approx(model, u, strict=True)
        return [u, t, _exp_or_zero(exact), _exp_or_zero(thm1), _exp_or_zero(thm3), _exp_or_zero(thm3_strict),
                _ratio_from_logs(exact, thm1), _ratio_from_logs(exact, thm3)]

    rows = _map_ordered(row, u_grid)
    header = ["u", "t", "exact", "thm1", "thm3_default", "thm3_strict", "ratio_thm1", "ratio_thm3"]
    write_csv(out, header, rows, model.model_hash(), seed, __version__)
    return EXIT_OK


DEFAULT_Z_GRID = [round(-3.0 + 0.25 * i, 10) for i in range(25)]


def cmd_cond_cdf(cfg: Config, out, seed: Optional[int]) -> int:
    model = build_model(cfg)
    u_grid = cfg.get_grid("u_grid")
    if u_grid[0] <= 0:
        raise ConfigError("u_grid values must be positive")
    rho = model.rho
    law = asy.LimitLaw.power(model.angular.delta)
    scale = math.sqrt(1 - rho * rho)
    raw_y = "y_grid" in cfg
    if raw_y and "z_grid" in cfg:
        raise ConfigError("give either y_grid or z_grid, not both")
    grid = cfg.get_grid("y_grid") if raw_y else cfg.get_grid("z_grid", DEFAULT_Z_GRID)

    def block(u):
        t = float(model.radial.t(u))
        ys = grid if raw_y else [rho * u + z * u * scale / math.sqrt(t) for z in grid]
        exact = polar_exact.conditional_cdf_grid(model, u, ys)
        rows = []
        for y, e in zip(ys, exact):
            z = asy.standardized_z(u, y, rho, t)
            limit = law.cdf(z)
            if rho >= 0:
                second = 1.0 - asy.thm4_second_order(z, rho, t, law)
            else:
                second = math.nan  # the expansion is stated for rho >= 0 only
            rows.append([u, y, e, limit, second, abs(e - limit), abs(e - second)])
        return rows

    rows = [r for rows in _map_ordered(block, u_grid) for r in rows]
    header = ["u", "y", "exact", "limit", "second_order", "err_limit", "err_2nd"]
    write_csv(out, header, rows, model.model_hash(), seed, __version__)
    return EXIT_OK


def cmd_simulate(cfg: Config, out, seed: Optional[int]) -> int:
    model = build_model(cfg)
    n = cfg.get_int("n")
    if n < 1:
        raise ConfigError("n must be at least 1")
    seed = cfg.get_int("seed", DEFAULT_SEED) if seed is None else seed
    batch = sampling.sample_polar(model, n, seed)
    batch.to_csv(out, __version__)
    return EXIT_OK


def cmd_estimate(cfg: Config, out, seed: Optional[int], input_path: Optional[str]) -> int:
    path = input_path or cfg.get_str("input")
    try:
        batch = sampling.SampleBatch.from_csv(path)
    except OSError as exc:
        raise ConfigError(f"cannot read sample {path}: {exc.strerror}") from None
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    n = len(batch)
    k = cfg.get_int("k", max(estimation.MIN_TOP_K, n // 100))
    tail_fraction = cfg.get_float("tail_fraction", 0.1)
    provided = cfg.get_float("estimate.delta") if "estimate.delta" in cfg else None
    report = estimation.estimate(batch, k=k, tail_fraction=tail_fraction, provided_delta=provided)
    text = f"# manifest: {batch.model_descriptor or '-'} {'-' if batch.seed is None else batch.seed} {__version__}\n"
    text += report.to_text()
    if out is None or str(out) == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)
    return EXIT_OK


def cmd_validate(cfg: Config, out, seed: Optional[int]) -> int:
    model = build_model(cfg)
    seed = cfg.get_int("seed", DEFAULT_SEED) if seed is None else seed
    results = validation.run_suite(model, seed)
    lines = [r.line() for r in results]
    passed = all(r.passed for r in results)
    lines.append(f"{'PASS' if passed else 'FAIL'} {sum(r.passed for r in results)}/{len(results)} checks")
    text = "\n".join(lines) + "\n"
    if out is None or str(out) == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)
    return EXIT_OK if passed else 1


# -- entry point ---------------------------------------------------------------------


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polar-tails", description="Tail probabilities of bivariate polar vectors.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("tail-table", "exact marginal tail against its approximations over u_grid"),
        ("cond-cdf", "exact conditional CDF against the limit law and its second-order correction"),
        ("simulate", "draw n pairs and write them as CSV"),
        ("estimate", "fit rho, w and delta to a sample CSV"),
        ("validate", "run the invariant suite; exit 0 iff all checks pass"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="key = value configuration file")
        p.add_argument("--out", default=None, help="output path (stdout when omitted)")
        p.add_argument("--seed", type=_seed, default=None, help="unsigned 64-bit seed")
        if name == "estimate":
            p.add_argument("--input", default=None, help="sample CSV (overrides the 'input' key)")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors, which matches the configuration-error code
        return int(exc.code or 0)
    try:
        cfg = Config.load(args.config)
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            if args.command == "tail-table":
                return cmd_tail_table(cfg, args.out, args.seed)
            if args.command == "cond-cdf":
                return cmd_cond_cdf(cfg, args.out, args.seed)
            if args.command == "simulate":
                return cmd_simulate(cfg, args.out, args.seed)
            if args.command == "estimate":
                return cmd_estimate(cfg, args.out, args.seed, args.input)
            return cmd_validate(cfg, args.out, args.seed)
    except (ConfigError, InsufficientDataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (QuadratureError, FloatingPointError, ArithmeticError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
