"""Command-line frontend: estimate, bench, adversary, probe.

Exit codes: 0 success, 2 usage error (bad flags, malformed numeric
arguments), 1 runtime error (bad data, unsatisfiable preconditions, I/O).
"""

from __future__ import annotations

import argparse
import math
import sys
import warnings

import numpy as np

from .adversarial import infvar_stress
from .core_estimators import median_of_means, quantile_interval
from .distributions import parse_distribution, regularity_probe
from .harness import ESTIMATORS, ExperimentConfig, run_tail_experiment, write_report
from .interval_combiner import multiple_delta_estimate
from .kurtosis_pipeline import KurtosisConfig, _pipeline, kurtosis_estimate, xi_terms

__all__ = ["run_cli", "main"]


def _deltas_arg(text: str) -> tuple[float, ...]:
    out = tuple(float(tok) for tok in text.split(","))
    if not out:
        raise ValueError("empty delta list")
    return out


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="subgauss",
        description="Robust mean estimation: estimators, Monte Carlo tail "
        "benchmarks, adversarial stress tests, regularity probes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="estimate a mean from a file of numbers")
    est.add_argument("--input", required=True, help="file with one number per line")
    est.add_argument("--estimator", required=True, choices=ESTIMATORS)
    est.add_argument("--delta", type=float, help="confidence level for delta-dependent estimators")
    est.add_argument("--b-max", dest="b_max", type=int, default=8)
    est.add_argument("--sigma2-hi", dest="sigma2_hi", type=float)
    est.add_argument("--k-reg", dest="k_reg", type=int, default=1)
    est.add_argument("--delta-min", dest="delta_min", type=float)
    est.add_argument("--kappa-bound", dest="kappa_bound", type=float)
    est.add_argument("--diagnostics", action="store_true")

    bench = sub.add_parser("bench", help="run a Monte Carlo tail experiment")
    bench.add_argument("--dist", required=True, type=parse_distribution)
    bench.add_argument("--estimator", required=True, choices=ESTIMATORS)
    bench.add_argument("--n", required=True, type=int)
    bench.add_argument("--trials", required=True, type=int)
    bench.add_argument("--deltas", required=True, type=_deltas_arg)
    bench.add_argument("--seed", required=True, type=int)
    bench.add_argument("--threads", type=int, default=1)
    bench.add_argument("--out", required=True)
    bench.add_argument("--format", required=True, choices=("csv", "json"))
    bench.add_argument("--k-reg", dest="k_reg", type=int)
    bench.add_argument("--sigma2-hi", dest="sigma2_hi", type=float)
    bench.add_argument("--delta-min", dest="delta_min", type=float)
    bench.add_argument("--b-max", dest="b_max", type=int)
    bench.add_argument("--kappa-bound", dest="kappa_bound", type=float)
    bench.add_argument("--l-target", dest="l_target", type=float)
    bench.add_argument("--error-cap", dest="error_cap", type=int)

    adv = sub.add_parser("adversary", help="stress an estimator with a coupled pair")
    adv.add_argument("--mode", required=True, choices=("infvar",))
    adv.add_argument("--alpha", required=True, type=float)
    adv.add_argument("--moment", required=True, type=float)
    adv.add_argument("--n", required=True, type=int)
    adv.add_argument("--delta", required=True, type=float)
    adv.add_argument("--trials", required=True, type=int)
    adv.add_argument("--seed", required=True, type=int)
    adv.add_argument("--p", type=float, help="override the coupling probability")
    adv.add_argument("--estimator", choices=("empirical", "mom"), default="empirical")

    probe = sub.add_parser("probe", help="estimate j-sum sign frequencies")
    probe.add_argument("--dist", required=True, type=parse_distribution)
    probe.add_argument("--j", required=True, type=int)
    probe.add_argument("--trials", required=True, type=int)
    probe.add_argument("--seed", required=True, type=int)
    return parser


def _read_values(path: str) -> np.ndarray:
    values = []
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            text = line.strip()
            if not text:
                continue
            try:
                values.append(float(text))
            except ValueError:
                raise ValueError(f"{path}:{lineno}: not a number: {text!r}") from None
    if not values:
        raise ValueError(f"{path}: no numbers found")
    return np.asarray(values, dtype=np.float64)


def _cmd_estimate(parser: argparse.ArgumentParser, args) -> int:
    values = _read_values(args.input)
    name = args.estimator
    caught: list[warnings.WarningMessage] = []
    if name == "empirical":
        estimate = float(values.mean())
    elif name == "mom":
        if args.delta is None:
            parser.error("estimator 'mom' requires --delta")
        estimate = median_of_means(values, args.delta)
    elif name == "quantile_kreg":
        if args.delta is None:
            parser.error("estimator 'quantile_kreg' requires --delta")
        estimate = quantile_interval(values, args.delta, args.k_reg).midpoint
    elif name == "combined_fixed_sigma":
        if args.sigma2_hi is None:
            parser.error("estimator 'combined_fixed_sigma' requires --sigma2-hi")
        if args.delta_min is None:
            parser.error("estimator 'combined_fixed_sigma' requires --delta-min")
        estimate = multiple_delta_estimate(
            values, "fixed_sigma", sigma2_hi=args.sigma2_hi, delta_min=args.delta_min
        )
    elif name == "combined_adaptive":
        if args.delta_min is None:
            parser.error("estimator 'combined_adaptive' requires --delta-min")
        estimate = multiple_delta_estimate(values, "adaptive", delta_min=args.delta_min)
    else:
        if args.diagnostics and args.kappa_bound is None:
            parser.error("--diagnostics with 'kurtosis' requires --kappa-bound")
        if args.kappa_bound is not None:
            config = KurtosisConfig(b_max=args.b_max, kappa_bound=args.kappa_bound)
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always")
                estimate = kurtosis_estimate(values, config)
        else:
            if values.size < 4:
                raise ValueError("kurtosis estimator needs n >= 4")
            if values.size // args.b_max < 2:
                raise ValueError(
                    f"every block needs at least 2 points (n={values.size}, b_max={args.b_max})"
                )
            estimate = _pipeline(values, args.b_max)[3]
    print(format(estimate, ".17g"))
    if args.diagnostics and name == "kurtosis":
        terms = xi_terms(args.kappa_bound, values.size, args.b_max)
        print(f"xi = {terms.xi:.17g}")
        print(f"xi1 = {terms.xi1:.17g}")
        print(f"xi2 = {terms.xi2:.17g}")
        print(f"l_effective = {math.sqrt(2.0) * (1.0 + terms.xi):.17g}")
        for record in caught:
            print(f"warning: {record.message}")
    return 0


def _cmd_bench(args) -> int:
    params = {}
    for key in ("k_reg", "sigma2_hi", "delta_min", "b_max", "kappa_bound", "l_target"):
        value = getattr(args, key)
        if value is not None:
            params[key] = value
    extra = {}
    if args.error_cap is not None:
        extra["error_cap"] = args.error_cap
    config = ExperimentConfig(
        dist=args.dist,
        estimator=args.estimator,
        n=args.n,
        trials=args.trials,
        deltas=args.deltas,
        seed=args.seed,
        threads=args.threads,
        params=params,
        **extra,
    )
    report = run_tail_experiment(config)
    write_report(report, args.format, args.out)
    print(
        f"wrote {args.out} ({len(report.rows)} rows, {report.wall_time_s:.3f} s)",
        file=sys.stderr,
    )
    return 0


def _cmd_adversary(args) -> int:
    if args.estimator == "mom":
        delta = args.delta

        def fn(arr: np.ndarray) -> float:
            return median_of_means(arr, delta)

    else:

        def fn(arr: np.ndarray) -> float:
            return float(arr.mean())

    fail_plus, fail_minus, match = infvar_stress(
        fn, args.n, args.delta, args.alpha, args.moment, args.trials, args.seed, p=args.p
    )
    print(f"failure_rate_plus = {fail_plus:.17g}")
    print(f"failure_rate_minus = {fail_minus:.17g}")
    print(f"match_rate = {match:.17g}")
    return 0


def _cmd_probe(args) -> int:
    p_minus, p_plus = regularity_probe(args.dist, args.j, args.trials, args.seed)
    print(f"p_minus_hat = {p_minus:.17g}")
    print(f"p_plus_hat = {p_plus:.17g}")
    return 0


def run_cli(argv) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(list(argv))
        if args.command == "estimate":
            return _cmd_estimate(parser, args)
        if args.command == "bench":
            return _cmd_bench(args)
        if args.command == "adversary":
            return _cmd_adversary(args)
        return _cmd_probe(args)
    except SystemExit as exc:
        code = exc.code
        if code is None:
            return 0
        return code if isinstance(code, int) else 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main(argv=None) -> None:
    sys.exit(run_cli(sys.argv[1:] if argv is None else argv))
