"""Command-line interface: one binary, subcommand per operation.

Conventions: vectors come in as CSV (one value per line, optional header) or
JSON arrays; results go out as JSON (stdout or ``--out``), full double
precision; indices in JSON are 1-based. Every run emits a manifest with the
resolved configuration so outputs can be reproduced exactly. Exit codes:
0 success, 1 usage error, 2 data/validation error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .core import ConfigurationError, NoiseSpec, Observation, simulate
from .experiments import (
    ExperimentConfig,
    contraction_curve,
    dimension_check,
    selector_quality,
    table1,
)
from .oracle import ebr_member, restricted_tau_oracle, tau_oracle
from .posterior import build, product_posterior, sample, shrinkage_mean
from .selector import hard_threshold_estimate, select
from .uq import confidence_ball, covers, theory_constants

__all__ = ["dispatch", "main"]


class UsageError(Exception):
    """Bad command line (unknown flag, missing argument)."""


class DataError(ValueError):
    """Malformed input file."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would sys.exit(2); we own the codes
        raise UsageError(message)


def _read_vector(path: str) -> np.ndarray:
    """Read a vector from CSV (one value per line, optional header) or JSON."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if path.endswith(".json"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}: invalid JSON: {exc}") from exc
        if not isinstance(data, list):
            raise DataError(f"{path}: expected a JSON array of numbers")
        return np.asarray(data, dtype=float)
    values = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        token = line.strip()
        if not token:
            continue
        try:
            values.append(float(token))
        except ValueError:
            if lineno == 1 and not values:
                continue  # optional header
            raise DataError(f"{path}:{lineno}: not a number: {token!r}") from None
    if not values:
        raise DataError(f"{path}: no numeric values found")
    return np.asarray(values, dtype=float)


def _csv_lines(arr: np.ndarray) -> str:
    return "\n".join(f"{v:.17g}" for v in arr) + "\n"


def _one_based(indices: np.ndarray) -> list[int]:
    return [int(i) + 1 for i in indices]


def _noise_from_args(args) -> NoiseSpec:
    if getattr(args, "noise", None):
        try:
            with open(args.noise, "r", encoding="utf-8") as fh:
                return NoiseSpec.from_dict(json.load(fh))
        except OSError as exc:
            raise DataError(f"cannot read {args.noise}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise DataError(f"{args.noise}: invalid JSON: {exc}") from exc
    kwargs = {"family": args.family}
    if args.bound is not None:
        kwargs["bound"] = args.bound
    if args.df is not None:
        kwargs["df"] = args.df
    return NoiseSpec(**kwargs)


def _resolve_threads(value: int | None) -> int:
    if value is not None:
        return max(1, value)
    env = os.environ.get("SPARSE_EB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigurationError(f"SPARSE_EB_THREADS must be an integer, got {env!r}")
    return os.cpu_count() or 1


def _manifest(args, started: float) -> dict:
    config = {
        k: v for k, v in sorted(vars(args).items()) if k != "func" and not k.startswith("_")
    }
    return {
        "subcommand": args.subcommand,
        "config": config,
        "seed": getattr(args, "seed", None),
        "version": __version__,
        "wall_time_s": time.time() - started,
    }


def _emit(payload: dict, args, started: float) -> None:
    """Write the payload to --out (manifest alongside) or stdout (embedded)."""
    out = getattr(args, "out", None)
    manifest = _manifest(args, started)
    if out:
        if out.endswith(".csv"):
            body = _csv_lines(np.asarray(payload["_csv"]))
        else:
            body = json.dumps({k: v for k, v in payload.items() if k != "_csv"}, indent=2) + "\n"
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(body)
        with open(out + ".manifest.json", "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2)
            fh.write("\n")
    else:
        doc = {k: v for k, v in payload.items() if k != "_csv"}
        doc["manifest"] = manifest
        print(json.dumps(doc, indent=2))


def _noise_args(sub) -> None:
    sub.add_argument("--noise", help="JSON file with a noise spec")
    sub.add_argument("--family", default="gaussian-iid", help="noise family name")
    sub.add_argument("--bound", type=float, default=None, help="bound for uniform noise")
    sub.add_argument("--df", type=float, default=None, help="degrees of freedom for student-t")


def _parse_grid(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise UsageError(f"cannot parse grid {text!r}; expected comma-separated numbers")


# ----------------------------------------------------------------- handlers


def _cmd_simulate(args, started):
    noise = _noise_from_args(args)
    obs = simulate(_read_vector(args.theta), args.sigma, noise, args.seed)
    payload = {"x": obs.x.tolist(), "sigma": obs.sigma, "_csv": obs.x}
    _emit(payload, args, started)


def _cmd_select(args, started):
    x = Observation(_read_vector(args.x), args.sigma)
    sel = select(x, args.kappa)
    payload = {
        "selected": _one_based(sel.selected),
        "k_hat": sel.cardinality,
        "threshold": sel.threshold,
        "radius_sq": sel.radius_sq,
        "criterion_curve": sel.criterion_values.tolist(),
    }
    _emit(payload, args, started)


def _cmd_estimate(args, started):
    x = Observation(_read_vector(args.x), args.sigma)
    if args.method == "threshold":
        sel = select(x, args.kappa)
        est = hard_threshold_estimate(x, args.kappa)
        payload = {
            "method": "threshold",
            "selected": _one_based(sel.selected),
            "k_hat": sel.cardinality,
            "threshold": sel.threshold,
            "radius_sq": sel.radius_sq,
            "estimate": est.tolist(),
        }
    elif args.method == "shrinkage":
        post = build(x, args.kappa)
        q = post.cardinality_posterior
        if args.truncate_q is not None:
            q = np.where(q >= args.truncate_q, q, 0.0)
        payload = {
            "method": "shrinkage",
            "q": q.tolist(),
            "p": post.inclusion.tolist(),
            "mean": shrinkage_mean(post, x).tolist(),
        }
    else:
        if args.K is None:
            raise ConfigurationError("--K is required for --method product")
        prod = product_posterior(x, args.kappa, args.K)
        payload = {
            "method": "product",
            "p": prod.inclusion.tolist(),
            "mean": prod.mean.tolist(),
            "median": prod.median.tolist(),
        }
    _emit(payload, args, started)


def _cmd_sample(args, started):
    x = Observation(_read_vector(args.x), args.sigma)
    post = build(x, args.kappa)
    draws = sample(post, x, args.seed, args.count)
    payload = {
        "count": args.count,
        "draws": [
            {"subset": _one_based(d.subset), "value": d.value.tolist()} for d in draws
        ],
    }
    _emit(payload, args, started)


def _cmd_oracle(args, started):
    theta = _read_vector(args.theta)
    if args.k_min:
        report = restricted_tau_oracle(theta, args.sigma, args.tau, args.k_min)
    else:
        report = tau_oracle(theta, args.sigma, args.tau)
    payload = {
        "tau": report.tau,
        "oracle_set": _one_based(report.oracle_set),
        "oracle_cardinality": report.oracle_cardinality,
        "rate_sq": report.rate_sq,
        "bias_part": report.bias_part,
        "variance_part": report.variance_part,
        "ebr_ratio": report.ebr_ratio,
    }
    if args.t is not None:
        payload["t"] = args.t
        payload["ebr_member"] = bool(report.ebr_ratio <= args.t)
    _emit(payload, args, started)


def _cmd_ebr(args, started):
    theta = _read_vector(args.theta)
    report = tau_oracle(theta, args.sigma, args.tau)
    payload = {
        "tau": args.tau,
        "t": args.t,
        "ebr_ratio": report.ebr_ratio,
        "member": ebr_member(theta, args.sigma, args.tau, args.t),
    }
    _emit(payload, args, started)


def _cmd_ball(args, started):
    x = Observation(_read_vector(args.x), args.sigma)
    ball = confidence_ball(x, args.kappa, args.M, args.center)
    payload = {
        "center": ball.center.tolist(),
        "radius": ball.radius,
        "inflation_factor": ball.inflation_factor,
        "base_radius_sq": ball.base_radius_sq,
        "center_method": args.center,
    }
    if args.theta:
        payload["covers"] = covers(ball, _read_vector(args.theta))
    _emit(payload, args, started)


def _cmd_constants(args, started):
    tc = theory_constants(args.beta, args.B, args.kappa)
    rhos = _parse_grid(args.rho) if args.rho else [0.0, 0.25, 0.5, 0.75, 0.9]
    payload = {
        "beta": tc.beta,
        "B": tc.B,
        "kappa": tc.kappa,
        "kappa_bar": tc.kappa_bar,
        "satisfies_kappa_condition": tc.satisfies_kappa_condition,
        "tau_bar": {str(r): tc.tau_bar(r) for r in rhos},
        "normal_case": {
            "h0": tc.normal_case.h0,
            "c1": tc.normal_case.c1,
            "c2": tc.normal_case.c2,
            "c3": tc.normal_case.c3,
            "kappa_bar": tc.normal_case.kappa_bar,
            "c1_exceeds_two": tc.c1_exceeds_two,
            "satisfies_normal_case_bound": tc.satisfies_normal_case_bound,
        },
    }
    _emit(payload, args, started)


def _table1_csv(rows) -> str:
    header = "p,A,M,ratio,coverage,mean_k_hat,se_coverage"
    lines = [header]
    for r in rows:
        lines.append(
            f"{r.p},{r.A:.17g},{r.M:.17g},{r.ratio:.17g},"
            f"{r.coverage:.17g},{r.mean_k_hat:.17g},{r.se_coverage:.17g}"
        )
    return "\n".join(lines) + "\n"


def _cmd_table1(args, started):
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            config = ExperimentConfig.from_dict(json.load(fh))
    except OSError as exc:
        raise DataError(f"cannot read {args.config}: {exc}") from exc
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise DataError(f"{args.config}: invalid experiment config: {exc}") from exc
    threads = _resolve_threads(args.threads)
    rows = table1(config, threads=threads, calibrate_coverage=args.calibrate_M)
    out_dir = args.out_dir or "."
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, "table1.csv")
    json_path = os.path.join(out_dir, "table1.json")
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write(_table1_csv(rows))
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump({"rows": [r.to_dict() for r in rows], "config": config.to_dict()}, fh, indent=2)
        fh.write("\n")
    manifest = _manifest(args, started)
    manifest["config"]["resolved_threads"] = threads
    manifest["outputs"] = [csv_path, json_path]
    with open(os.path.join(out_dir, "table1.manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    print(f"wrote {csv_path} and {json_path}", file=sys.stderr)


def _write_gnuplot(path: str, curve: list[tuple[float, float]]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# M mass\n")
        for m, mass in curve:
            fh.write(f"{m:.17g} {mass:.17g}\n")


def _cmd_contraction(args, started):
    theta = _read_vector(args.theta)
    noise = _noise_from_args(args)
    curve = contraction_curve(
        theta,
        args.sigma,
        args.kappa,
        noise,
        args.seed,
        _parse_grid(args.m_grid),
        m0=args.m0,
        replications=args.replications,
        draws=args.draws,
        threads=_resolve_threads(args.threads),
    )
    if args.gnuplot:
        _write_gnuplot(args.gnuplot, curve)
    _emit({"m0": args.m0, "curve": [[m, mass] for m, mass in curve]}, args, started)


def _cmd_dimcheck(args, started):
    theta = _read_vector(args.theta)
    noise = _noise_from_args(args)
    curve = dimension_check(
        theta,
        args.sigma,
        args.kappa,
        noise,
        args.seed,
        _parse_grid(args.m_grid),
        replications=args.replications,
        threads=_resolve_threads(args.threads),
    )
    if args.gnuplot:
        _write_gnuplot(args.gnuplot, curve)
    _emit({"curve": [[m, mass] for m, mass in curve]}, args, started)


def _cmd_selq(args, started):
    theta = _read_vector(args.theta)
    noise = _noise_from_args(args)
    result = selector_quality(
        theta,
        args.sigma,
        args.kappa,
        args.tau,
        noise,
        args.seed,
        args.reps,
        threads=_resolve_threads(args.threads),
    )
    payload = {
        "rates_sq": result.rates_sq.tolist(),
        "oracle_rate_sq": result.oracle_rate_sq,
    }
    if result.oracle_rate_sq > 0:
        payload["ratios"] = result.ratios.tolist()
    _emit(payload, args, started)


# ------------------------------------------------------------------ parser


def build_parser() -> _Parser:
    parser = _Parser(prog="sparse-eb", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="subcommand", required=True)

    def add(name, func, help_text):
        sub = subs.add_parser(name, help=help_text)
        sub.set_defaults(func=func, subcommand=name)
        return sub

    s = add("simulate", _cmd_simulate, "draw x = theta + sigma * noise")
    s.add_argument("--theta", required=True)
    s.add_argument("--sigma", type=float, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--out")
    _noise_args(s)

    s = add("select", _cmd_select, "penalized subset selection")
    s.add_argument("--x", required=True)
    s.add_argument("--sigma", type=float, required=True)
    s.add_argument("--kappa", type=float, default=0.7)
    s.add_argument("--out")

    s = add("estimate", _cmd_estimate, "threshold / shrinkage / product estimates")
    s.add_argument("--x", required=True)
    s.add_argument("--sigma", type=float, required=True)
    s.add_argument("--kappa", type=float, default=0.7)
    s.add_argument("--method", choices=["threshold", "shrinkage", "product"], default="threshold")
    s.add_argument("--K", type=float, default=None, help="slab variance factor (product prior)")
    s.add_argument("--truncate-q", type=float, default=None, dest="truncate_q")
    s.add_argument("--out")

    s = add("sample", _cmd_sample, "exact posterior draws")
    s.add_argument("--x", required=True)
    s.add_argument("--sigma", type=float, required=True)
    s.add_argument("--kappa", type=float, default=0.7)
    s.add_argument("--count", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--out")

    s = add("oracle", _cmd_oracle, "oracle set, rate, and excessive bias ratio")
    s.add_argument("--theta", required=True)
    s.add_argument("--sigma", type=float, required=True)
    s.add_argument("--tau", type=float, default=1.0)
    s.add_argument("--t", type=float, default=None)
    s.add_argument("--k-min", type=int, default=0, dest="k_min")
    s.add_argument("--out")

    s = add("ebr", _cmd_ebr, "excessive-bias-ratio class membership")
    s.add_argument("--theta", required=True)
    s.add_argument("--sigma", type=float, required=True)
    s.add_argument("--tau", type=float, default=1.0)
    s.add_argument("--t", type=float, required=True)
    s.add_argument("--out")

    s = add("ball", _cmd_ball, "confidence ball around an estimator")
    s.add_argument("--x", required=True)
    s.add_argument("--sigma", type=float, required=True)
    s.add_argument("--kappa", type=float, default=0.7)
    s.add_argument("--M", type=float, required=True)
    s.add_argument("--center", choices=["threshold", "shrinkage"], default="threshold")
    s.add_argument("--theta", default=None, help="optional true signal to test coverage")
    s.add_argument("--out")

    s = add("constants", _cmd_constants, "theory constants calculator")
    s.add_argument("--beta", type=float, required=True)
    s.add_argument("--B", type=float, required=True)
    s.add_argument("--kappa", type=float, required=True)
    s.add_argument("--rho", default=None, help="comma-separated rho grid for tau_bar")
    s.add_argument("--out")

    s = add("table1", _cmd_table1, "coverage table over a (p, A) grid")
    s.add_argument("--config", required=True)
    s.add_argument("--calibrate-M", type=float, default=None, dest="calibrate_M")
    s.add_argument("--out-dir", default=None, dest="out_dir")
    s.add_argument("--threads", type=int, default=None)

    s = add("contraction", _cmd_contraction, "posterior contraction tail curve")
    s.add_argument("--theta", required=True)
    s.add_argument("--sigma", type=float, required=True)
    s.add_argument("--kappa", type=float, default=0.7)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--m-grid", required=True, dest="m_grid")
    s.add_argument("--m0", type=float, default=1.0)
    s.add_argument("--replications", type=int, default=20)
    s.add_argument("--draws", type=int, default=2000)
    s.add_argument("--threads", type=int, default=None)
    s.add_argument("--gnuplot", default=None)
    s.add_argument("--out")
    _noise_args(s)

    s = add("dimcheck", _cmd_dimcheck, "posterior over-dimensionality curve")
    s.add_argument("--theta", required=True)
    s.add_argument("--sigma", type=float, required=True)
    s.add_argument("--kappa", type=float, default=0.7)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--m-grid", required=True, dest="m_grid")
    s.add_argument("--replications", type=int, default=100)
    s.add_argument("--threads", type=int, default=None)
    s.add_argument("--gnuplot", default=None)
    s.add_argument("--out")
    _noise_args(s)

    s = add("selq", _cmd_selq, "selected-set rate vs oracle rate")
    s.add_argument("--theta", required=True)
    s.add_argument("--sigma", type=float, required=True)
    s.add_argument("--kappa", type=float, default=0.7)
    s.add_argument("--tau", type=float, default=1.0)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--reps", type=int, default=100)
    s.add_argument("--threads", type=int, default=None)
    s.add_argument("--out")
    _noise_args(s)

    return parser


def dispatch(argv) -> int:
    """Parse argv and run one subcommand; returns the process exit code."""
    started = time.time()
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    try:
        args.func(args, started)
        return 0
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except (ConfigurationError, ValueError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except (FloatingPointError, OverflowError, ZeroDivisionError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
