"""Command-line interface.

Every subcommand writes its outputs and a ``manifest.json`` into ``--out-dir``.
The manifest records the fully resolved command line, so ``coxkernel replay
manifest.json`` reruns it; with ``--threads 1`` outputs are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path


from . import __version__, streams
from .cltcheck import CltConfig, normality_distance, run_clt, write_clt_outputs
from .config import Scenario
from .dataset import read_dataset, simulate_dataset, write_dataset
from .errors import CoxKernelError, InvalidParameterError
from .estimate import DEFAULT_TRIM_EPS, EstimatorConfig, estimate_curve, poisson_baseline, write_estimates_csv
from .ingest import ThresholdConfig, build_real_dataset, parse_investing, parse_yahoo
from .montecarlo import McConfig, draw_design, run_study, time_grid
from .simulate import sample_covariate

MANIFEST = "manifest.json"

# subcommand-specific model defaults; flags and --config override them
MODEL_DEFAULTS = {
    "simulate": dict(a=0.5, b=2.0, beta0=0.1, renewal_eps=0.0075, d=1, n=500),
    "mc": dict(a=0.5, b=2.0, beta0=0.1, renewal_eps=0.0075, d=1, n=500),
    "clt": dict(a=0.5, b=2.0, beta0=0.1, renewal_eps=0.3, d=1, n=2000),
}


def _common(p):
    p.add_argument("--seed", type=int, help="master seed (default 0, or the scenario file's)")
    p.add_argument("--out-dir", default="out", help="directory for outputs (default ./out)")
    p.add_argument("--threads", type=int, default=1, help="worker processes for replications (default 1)")


def _model_flags(p):
    p.add_argument("--config", help="plain-text scenario file; flags override it")
    p.add_argument("--a", type=float, help="Weibull scale")
    p.add_argument("--b", type=float, help="Weibull shape")
    p.add_argument("--beta0", type=float, help="covariate coupling")
    p.add_argument("--renewal-eps", type=float, help="floor and mean of the schedule gaps")
    p.add_argument("--d", type=int, help="covariate dimension")
    p.add_argument("--n", type=int, help="trajectories per sample")


def _estimator_flags(p):
    p.add_argument("--h", type=float, help="time bandwidth")
    p.add_argument("--eta", type=float, help="covariate bandwidth")
    p.add_argument("--trim-eps", type=float, default=DEFAULT_TRIM_EPS, help="trimming exponent in (0, 1/2)")
    p.add_argument("--auto-bandwidth", action="store_true", help="h = eta = n^(-1/(5 + d M_t)) at each time")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coxkernel", description="Kernel intensity estimation for Cox processes.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate a dataset")
    _common(p)
    _model_flags(p)

    p = sub.add_parser("estimate", help="estimate the intensity on a dataset")
    _common(p)
    p.add_argument("--data-dir", required=True, help="directory written by 'simulate' or 'realdata'")
    p.add_argument("--eval-replicate", type=int, help="use this trajectory's covariates as evaluation point")
    p.add_argument("--grid", type=int, default=100, help="number of grid times i/grid (default 100)")
    _estimator_flags(p)

    p = sub.add_parser("mc", help="Monte Carlo study over a time grid")
    _common(p)
    _model_flags(p)
    p.add_argument("--n-mc", type=int, default=100, help="replications (default 100)")
    p.add_argument("--grid", type=int, default=100, help="number of grid times (default 100)")
    p.add_argument("--plot-data", action="store_true", help="also write quartile series for plotting")
    _estimator_flags(p)

    p = sub.add_parser("clt", help="normality check of the studentized estimator")
    _common(p)
    _model_flags(p)
    p.add_argument("--n-mc", type=int, default=500, help="replications (default 500)")
    p.add_argument("--t", type=float, default=0.5, help="evaluation time (default 0.5)")
    p.add_argument("--bandwidth", choices=("undersmoothed", "mse"), default="undersmoothed")
    p.add_argument("--trim-eps", type=float, default=DEFAULT_TRIM_EPS)

    p = sub.add_parser("realdata", help="run the pipeline on equity and commodity CSV files")
    _common(p)
    p.add_argument("--equity", nargs="+", required=True, help="equity CSV files (Date,Open,...,Adj.Close)")
    p.add_argument("--oil", required=True, help="commodity CSV file (Date,Price,Open,High,Low,Vol.,Change)")
    p.add_argument("--alpha", type=float, default=ThresholdConfig.alpha, help="commodity return trigger")
    p.add_argument("--beta-thr", type=float, default=ThresholdConfig.beta_thr, help="equity return trigger")
    p.add_argument("--grid", type=int, default=100)
    _estimator_flags(p)

    p = sub.add_parser("replay", help="rerun the command recorded in a manifest")
    p.add_argument("manifest")
    p.add_argument("--out-dir", help="override the recorded output directory")
    p.add_argument("--threads", type=int, help="override the recorded worker count")
    return parser


def _resolve_model(args):
    values = dict(MODEL_DEFAULTS[args.command], seed=0)
    if args.config:
        values = Scenario.from_text(Path(args.config).read_text(), **values).__dict__.copy()
    for key in ("a", "b", "beta0", "renewal_eps", "d", "n", "seed"):
        flag = getattr(args, key)
        if flag is not None:
            values[key] = flag
    scenario = Scenario(**values)
    for key in ("a", "b", "beta0", "renewal_eps", "d", "n", "seed"):
        setattr(args, key, getattr(scenario, key))
    args.config = None
    return scenario


def _resolve_estimator(args):
    """Return an EstimatorConfig, or ``"auto"``."""
    if args.auto_bandwidth or (args.h is None and args.eta is None):
        if args.h is not None or args.eta is not None:
            raise InvalidParameterError("--auto-bandwidth cannot be combined with --h/--eta")
        args.auto_bandwidth = True
        EstimatorConfig(h=1.0, eta=1.0, trim_eps=args.trim_eps)
        return "auto"
    if args.h is None or args.eta is None:
        raise InvalidParameterError("give both --h and --eta, or --auto-bandwidth")
    return EstimatorConfig(h=args.h, eta=args.eta, trim_eps=args.trim_eps)


def _canonical_argv(parser, args) -> list:
    sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    subparser = sub.choices[args.command]
    argv = [args.command]
    for action in subparser._actions:
        if not action.option_strings or action.dest in ("help",):
            continue
        value = getattr(args, action.dest, None)
        flag = action.option_strings[-1]
        if isinstance(action, argparse._StoreTrueAction):
            if value:
                argv.append(flag)
        elif value is None:
            continue
        elif isinstance(value, list):
            argv.append(flag)
            argv.extend(str(v) for v in value)
        else:
            argv.extend([flag, repr(value) if isinstance(value, float) else str(value)])
    return argv


def _write_manifest(out_dir: Path, args, parser, config: dict, inputs, outputs) -> Path:
    manifest = {
        "tool": "coxkernel",
        "version": __version__,
        "subcommand": args.command,
        "seed": args.seed,
        "config": config,
        "inputs": [str(p) for p in inputs],
        "outputs": sorted(Path(p).name for p in outputs),
        "out_dir": str(out_dir),
        "argv": _canonical_argv(parser, args),
    }
    path = out_dir / MANIFEST
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def cmd_simulate(args, parser):
    scenario = _resolve_model(args)
    model = scenario.model()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    schedule, _ = draw_design(model, scenario.d, scenario.seed)
    data = simulate_dataset(schedule, model, scenario.n, scenario.d, streams.replication_stream(scenario.seed, 0))
    outputs = write_dataset(data, out)
    scenario_path = out / "scenario.ini"
    scenario_path.write_text(scenario.to_text())
    outputs.append(scenario_path)
    return _write_manifest(out, args, parser, scenario.__dict__, [], outputs)


def cmd_estimate(args, parser):
    est = _resolve_estimator(args)
    data = read_dataset(args.data_dir)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if args.eval_replicate is not None:
        if not 0 <= args.eval_replicate < data.n:
            raise InvalidParameterError(f"--eval-replicate must lie in [0, {data.n - 1}]")
        z = data.paths[args.eval_replicate]
    else:
        z = sample_covariate(data.schedule, data.d, streams.evaluation_stream(args.seed))
    grid = time_grid(args.grid)
    results = estimate_curve(grid, z, data, est, args.trim_eps)
    outputs = [write_estimates_csv(out / "estimates.csv", results, d=data.d)]
    config = {
        "estimator": "auto" if est == "auto" else {"h": est.h, "eta": est.eta},
        "trim_eps": args.trim_eps,
        "grid": args.grid,
        "eval_replicate": args.eval_replicate,
        "n": data.n,
        "d": data.d,
    }
    return _write_manifest(out, args, parser, config, [args.data_dir], outputs)


def cmd_mc(args, parser):
    scenario = _resolve_model(args)
    est = _resolve_estimator(args)
    config = McConfig(
        model=scenario.model(),
        n=scenario.n,
        n_mc=args.n_mc,
        n_t=args.grid,
        d=scenario.d,
        master_seed=scenario.seed,
        estimator=est,
        trim_eps=args.trim_eps,
        threads=args.threads,
    )
    summary = run_study(config)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    outputs = [summary.write_csv(out / "summary.csv")]
    (out / "summary.json").write_text(summary.to_json())
    outputs.append(out / "summary.json")
    if args.plot_data:
        outputs.append(summary.write_plot_data(out / "plot_data.csv"))
    return _write_manifest(out, args, parser, config.to_dict(), [], outputs)


def cmd_clt(args, parser):
    scenario = _resolve_model(args)
    config = CltConfig(
        model=scenario.model(),
        n=scenario.n,
        n_mc=args.n_mc,
        t=args.t,
        d=scenario.d,
        master_seed=scenario.seed,
        bandwidth=args.bandwidth,
        trim_eps=args.trim_eps,
        threads=args.threads,
    )
    sample = run_clt(config)
    ks = normality_distance(sample) if sample.statistics.size >= 100 else None
    out = Path(args.out_dir)
    outputs = write_clt_outputs(sample, out, ks)
    return _write_manifest(out, args, parser, config.to_dict(), [], outputs)


def cmd_realdata(args, parser):
    est = _resolve_estimator(args)
    equities = []
    for path in args.equity:
        equities.append(parse_yahoo(Path(path).read_text(encoding="utf-8"), source=path, name=Path(path).stem))
    oil = parse_investing(Path(args.oil).read_text(encoding="utf-8"), source=args.oil, name=Path(args.oil).stem)
    real = build_real_dataset(equities, oil, ThresholdConfig(alpha=args.alpha, beta_thr=args.beta_thr))

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    outputs = write_dataset(real.dataset, out)

    companies = out / "companies.csv"
    companies.write_text("replicate,name\n" + "".join(f"{k},{name}\n" for k, name in enumerate(real.names)))
    events = out / "events.json"
    events.write_text(
        json.dumps(
            {
                "calendar": [d.isoformat() for d in real.calendar],
                "schedule_dates": [d.isoformat() for d in real.schedule_dates],
                "jump_dates": {k: [d.isoformat() for d in v] for k, v in real.jump_dates.items()},
            },
            indent=2,
            sort_keys=True,
        )
        + "\n"
    )
    outputs += [companies, events]

    grid = time_grid(args.grid)
    results, labels = [], []
    for k, (name, z) in enumerate(zip(real.names, real.dataset.paths)):
        results.extend(estimate_curve(grid, z, real.dataset, est, args.trim_eps))
        labels.extend([name] * grid.size)
    outputs.append(write_estimates_csv(out / "curves.csv", results, labels=labels, label_name="company"))

    baseline, h0 = poisson_baseline(grid, real.dataset, None if est == "auto" else est.h)
    path = out / "baseline.csv"
    path.write_text("t,h,estimate\n" + "".join(f"{t!r},{h0!r},{v!r}\n" for t, v in zip(grid.tolist(), baseline.tolist())))
    outputs.append(path)
    config = {
        "alpha": args.alpha,
        "beta_thr": args.beta_thr,
        "estimator": "auto" if est == "auto" else {"h": est.h, "eta": est.eta},
        "trim_eps": args.trim_eps,
        "grid": args.grid,
        "companies": real.names,
    }
    return _write_manifest(out, args, parser, config, list(args.equity) + [args.oil], outputs)


COMMANDS = {
    "simulate": cmd_simulate,
    "estimate": cmd_estimate,
    "mc": cmd_mc,
    "clt": cmd_clt,
    "realdata": cmd_realdata,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "replay":
        manifest = json.loads(Path(args.manifest).read_text())
        replay = list(manifest["argv"])
        if args.out_dir is not None:
            replay += ["--out-dir", args.out_dir]
        if args.threads is not None:
            replay += ["--threads", str(args.threads)]
        return main(replay)
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    if args.seed is None and not hasattr(args, "config"):
        args.seed = 0  # model commands resolve it against --config
    try:
        manifest = COMMANDS[args.command](args, parser)
    except InvalidParameterError as exc:
        print(f"coxkernel {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (CoxKernelError, OSError) as exc:
        print(f"coxkernel {args.command}: error: {exc}", file=sys.stderr)
        return 1
    print(manifest)
    return 0


if __name__ == "__main__":
    sys.exit(main())
