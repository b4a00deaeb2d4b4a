"""Command-line front end: simulate / estimate / benchmark / scan / bounds.

All subcommands read an optional JSON config file whose keys mirror
``ExperimentConfig``; explicit flags override file values, and the output
directory resolves as flag > HYPERJERK_OUTDIR > config > "out".  Exit codes:
0 success, 1 runtime or numerical failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import replace

import numpy as np

from . import __version__
from .bench import (
    ExperimentConfig,
    build_model,
    derive_seed,
    differentiation_bound_report,
    interior_local_maxima,
    likelihood_scan,
    mae_bound_report,
    monte_carlo,
    mse_rate_curve,
    write_bound_rows,
    write_curve_csv,
    write_result,
    _metadata,
)
from .differentiator import estimate_derivatives, plan_windows
from .estimator import SingularProblemError, build_regression, ridge_solve
from .simulator import (
    IntegrationDivergedError,
    atomic_write_text,
    integrate,
    observe,
    read_trajectory_csv,
    write_trajectory_csv,
)


def _parse_float_tuple(text: str) -> tuple:
    return tuple(float(v) for v in text.split(","))


def _parse_int_tuple(text: str) -> tuple:
    return tuple(int(v) for v in text.split(","))


def _load_config(args) -> ExperimentConfig:
    data = {}
    file_outdir = None
    if getattr(args, "config", None):
        with open(args.config) as fh:
            data = json.load(fh)
        file_outdir = data.pop("outdir", None)
    overrides = {
        "preset": getattr(args, "preset", None),
        "n": getattr(args, "n", None),
        "window_sizes": getattr(args, "windows", None),
        "lam": getattr(args, "lam", None),
        "trials": getattr(args, "trials", None),
        "seed": getattr(args, "seed", None),
        "noise": getattr(args, "noise", None),
        "substeps": getattr(args, "substeps", None),
        "theta": getattr(args, "theta", None),
        "xi0": getattr(args, "xi0", None),
        "T": getattr(args, "T", None),
    }
    for key, value in overrides.items():
        if value is not None:
            data[key] = value
    config = ExperimentConfig.from_dict(data)
    args._file_outdir = file_outdir
    return config


def _resolve_outdir(args) -> str:
    if getattr(args, "outdir", None):
        return args.outdir
    env = os.environ.get("HYPERJERK_OUTDIR")
    if env:
        return env
    file_outdir = getattr(args, "_file_outdir", None)
    if file_outdir:
        return file_outdir
    return "out"


def _add_common(sub):
    sub.add_argument("--config", help="JSON config file; flags override its values")
    sub.add_argument("-o", "--outdir", help="output directory (default: out)")
    sub.add_argument("--preset", choices=("vdp", "harmonic"))
    sub.add_argument("--n", type=int, help="number of samples")
    sub.add_argument("--seed", type=int, help="base random seed")
    sub.add_argument("--noise", type=lambda s: s, help="none | gaussian:<var> | sign_flip:<e>")
    sub.add_argument("--substeps", type=int, help="integrator substeps per sample interval")
    sub.add_argument("--theta", type=_parse_float_tuple, help="true parameters, comma separated")
    sub.add_argument("--xi0", type=_parse_float_tuple, help="initial state, comma separated")
    sub.add_argument("--T", type=float, help="horizon")
    sub.add_argument("-v", "--verbose", action="store_true")


def cmd_simulate(args) -> int:
    config = _load_config(args)
    outdir = _resolve_outdir(args)
    model = build_model(config)
    traj = integrate(model, config.n, config.substeps)
    z = observe(traj, config.noise, derive_seed(config.seed, 0))
    os.makedirs(outdir, exist_ok=True)
    path = os.path.join(outdir, "trajectory.csv")
    write_trajectory_csv(path, traj, z)
    meta = {"config": config.to_dict(), "metadata": _metadata()}
    atomic_write_text(
        os.path.join(outdir, "trajectory_meta.json"), json.dumps(meta, indent=2, sort_keys=True) + "\n"
    )
    if args.verbose:
        print(f"wrote {path} ({traj.n} rows)", file=sys.stderr)
    print(path)
    return 0


def cmd_estimate(args) -> int:
    config = _load_config(args)
    outdir = _resolve_outdir(args)
    data = read_trajectory_csv(args.data)
    if "z" not in data or "time" not in data:
        raise ValueError(f"{args.data} lacks the required time and z columns")
    z = data["z"]
    times = data["time"]
    n = z.size
    if n < 1:
        raise ValueError(f"{args.data} contains no data rows")
    T = float(times[-1])
    model = build_model(config)
    plan = plan_windows(n, args.N)
    derivs = estimate_derivatives(z, T, model.m, plan)
    problem = build_regression(derivs, model.phi, config.lam)
    est = ridge_solve(problem)
    theta = [float(v) for v in est.theta_hat]
    print("theta_hat =", " ".join(repr(v) for v in theta))
    print(f"sigma_min(Phi_hat) = {est.sigma_min_Phi_hat!r}")
    os.makedirs(outdir, exist_ok=True)
    payload = {
        "theta_hat": theta,
        "sigma_min_Phi_hat": est.sigma_min_Phi_hat,
        "lambda": est.lambda_used,
        "N": args.N,
        "n": n,
        "T": T,
        "preset": config.preset,
        "metadata": _metadata(),
    }
    path = os.path.join(outdir, "estimate.json")
    atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return 0


def cmd_benchmark(args) -> int:
    config = _load_config(args)
    outdir = _resolve_outdir(args)
    result = monte_carlo(config)
    paths = write_result(result, outdir)
    print(f"{'N':>6} {'RMSE(th1)':>12} {'RMSE(th2)':>12} {'vec RMSE':>12} {'vec MSE':>14} {'%RRMSE(vec)':>12}")
    for s in result.summaries:
        rm = list(s.rmse) + [float("nan")] * (2 - len(s.rmse))
        print(
            f"{s.N:>6} {rm[0]:>12.4g} {rm[1]:>12.4g} "
            f"{s.vector_rmse:>12.4g} {s.vector_mse:>14.6g} {s.vector_rrmse_pct:>12.3g}"
        )
    print(f"wrote {paths['trials']} and {paths['summary']}")
    return 0


def cmd_scan(args) -> int:
    config = _load_config(args)
    outdir = _resolve_outdir(args)
    model = build_model(config)
    component = args.component - 1
    if not 0 <= component < model.p:
        raise ValueError(f"--component must lie in 1..{model.p}")
    true_value = float(model.theta[component])
    lo = args.grid_lo if args.grid_lo is not None else true_value - 0.5 * abs(true_value)
    hi = args.grid_hi if args.grid_hi is not None else true_value + 0.5 * abs(true_value)
    if args.points < 1:
        raise ValueError(f"--points must be >= 1, got {args.points}")
    grid = np.linspace(lo, hi, args.points)
    traj = integrate(model, config.n, config.substeps)
    z = observe(traj, config.noise, derive_seed(config.seed, 0))
    curve = likelihood_scan(z, model, grid, component, config.substeps)
    os.makedirs(outdir, exist_ok=True)
    path = os.path.join(outdir, f"likelihood_theta{args.component}.csv")
    write_curve_csv(curve, path)
    meta = {
        "config": config.to_dict(),
        "component": args.component,
        "grid": [lo, hi, args.points],
        "interior_local_maxima": interior_local_maxima(curve.objective),
        "metadata": _metadata(),
    }
    atomic_write_text(
        os.path.join(outdir, f"likelihood_theta{args.component}_meta.json"),
        json.dumps(meta, indent=2, sort_keys=True) + "\n",
    )
    finite = np.isfinite(curve.objective)
    best = int(np.nanargmax(np.where(finite, curve.objective, -np.inf)))
    print(f"wrote {path}; argmax at {float(curve.grid[best])!r}, "
          f"{interior_local_maxima(curve.objective)} interior local maxima")
    return 0


def cmd_bounds(args) -> int:
    config = _load_config(args)
    outdir = _resolve_outdir(args)
    rows = differentiation_bound_report(
        omega=args.omega,
        sigma2=args.sigma2,
        n=config.n if args.n is not None else 512,
        N=args.N,
        m=args.m,
        T=config.T if config.T is not None else 1.0,
        trials=config.trials if args.trials is not None else 2000,
        seed=config.seed,
    )
    rate = mse_rate_curve(omega=args.omega, sigma2=args.sigma2, m=args.m, seed=config.seed)
    if args.mae:
        mae_config = replace(config, trials=min(config.trials, args.mae_trials))
        rows = rows + mae_bound_report(monte_carlo(mae_config))
    print(f"{'quantity':<34} {'empirical':>14} {'bound':>14} {'ratio':>10} {'ok':>6}")
    failed = False
    for r in rows:
        ok_text = "-" if r.ok is None else ("yes" if r.ok else "NO")
        failed = failed or r.ok is False
        print(f"{r.name:<34} {r.empirical:>14.6g} {r.bound:>14.6g} {r.ratio:>10.4g} {ok_text:>6}")
    print("total differentiation MSE with auto-selected window:")
    for n_value, N_sel, total in rate:
        print(f"  n={n_value:<8} N={N_sel:<6} total_mse={total:.6g}")
    paths = write_bound_rows(rows, outdir)
    print(f"wrote {paths['csv']} and {paths['json']}")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hyperjerk",
        description="Estimate hyperjerk-system parameters from noisy sampled output.",
    )
    parser.add_argument("--version", action="version", version=f"hyperjerk {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    sim = subs.add_parser("simulate", help="integrate a preset and write trajectory.csv")
    _add_common(sim)
    sim.set_defaults(func=cmd_simulate)

    est = subs.add_parser("estimate", help="estimate parameters from a trajectory CSV")
    _add_common(est)
    est.add_argument("data", help="trajectory CSV (needs time and z columns)")
    est.add_argument("-N", type=int, required=True, help="window length")
    est.add_argument("--lambda", dest="lam", type=float, help="ridge coefficient")
    est.set_defaults(func=cmd_estimate)

    ben = subs.add_parser("benchmark", help="Monte Carlo sampling distribution of theta_hat")
    _add_common(ben)
    ben.add_argument("--trials", type=int)
    ben.add_argument("--windows", type=_parse_int_tuple, help="window sizes, comma separated")
    ben.add_argument("--lambda", dest="lam", type=float)
    ben.set_defaults(func=cmd_benchmark)

    scn = subs.add_parser("scan", help="log-likelihood scan along one parameter axis")
    _add_common(scn)
    scn.add_argument("--component", type=int, default=1, help="1-based parameter index")
    scn.add_argument("--grid-lo", type=float)
    scn.add_argument("--grid-hi", type=float)
    scn.add_argument("--points", type=int, default=201)
    scn.set_defaults(func=cmd_scan)

    bnd = subs.add_parser("bounds", help="empirical errors versus theoretical envelopes")
    _add_common(bnd)
    bnd.add_argument("--omega", type=float, default=2.0 * math.pi)
    bnd.add_argument("--sigma2", type=float, default=1e-4)
    bnd.add_argument("-N", type=int, default=32, help="window length for the sin fixture")
    bnd.add_argument("--m", type=int, default=1, help="max derivative order of the fixture")
    bnd.add_argument("--trials", type=int)
    bnd.add_argument("--windows", type=_parse_int_tuple, help="window sizes for the --mae report")
    bnd.add_argument("--lambda", dest="lam", type=float)
    bnd.add_argument("--mae", action="store_true", help="append plug-in estimation-error rows")
    bnd.add_argument("--mae-trials", type=int, default=200)
    bnd.set_defaults(func=cmd_bounds)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (IntegrationDivergedError, SingularProblemError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
