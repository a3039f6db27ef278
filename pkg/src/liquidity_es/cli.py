"""Command-line entry point: ``liquidity-es {run,single,mc-check,ingest}``.

Exit status is 0 when every requested cell was computed (and, for
``mc-check``, no cell was flagged), 1 otherwise, and 2 for bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from . import experiments as ex
from .fourier import DEFAULT_SETTINGS
from .ingest import read_price_csv, sample_moments, to_log_returns
from .liquidity import LiquiditySpec

DEFAULT_BUCKETS = "1,2,4,6,12"


def _floats(text: str) -> tuple:
    return tuple(float(v) for v in text.split(",") if v.strip())


def _ints(text: str) -> tuple:
    return tuple(int(v) for v in text.split(",") if v.strip())


def _add_output(p: argparse.ArgumentParser):
    p.add_argument("--format", choices=ex.FORMATS, default=None,
                   help="output format (default: text, or the config's format)")
    p.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")


def _add_grid(p: argparse.ArgumentParser, *, require_single: bool = False):
    if not require_single:
        src = p.add_mutually_exclusive_group()
        src.add_argument("--paper", action="store_true",
                         help="built-in reference grid: five models, two bucket layouts, rho in {0, 0.5}")
        src.add_argument("--config", metavar="FILE", help="INI-style (or .json) experiment config")
    p.add_argument("--model", action="append", metavar="SPEC", required=require_single,
                   help="gauss | t:NU | vg:LAMBDA | nig:THETA | hyp:THETA | gig:LAMBDA,CHI,KAPPA"
                        + ("" if require_single else " (repeatable; replaces the config's models)"))
    p.add_argument("--alpha", metavar="A[,A...]", help="confidence level(s) in (0.5, 1)")
    p.add_argument("--rho", metavar="R[,R...]", help="equicorrelation(s) between bucket factors")
    p.add_argument("--buckets", metavar="H[,H...]",
                   help=f"horizons in base-horizon steps (e.g. {DEFAULT_BUCKETS})")
    p.add_argument("--tol", type=float, metavar="X",
                   help="relative stopping tolerance of the ES limit (in sd units)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="liquidity-es",
        description="Liquidity-adjusted expected shortfall under elliptical risk factors.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="evaluate an experiment grid of scaling ratios")
    _add_grid(p)
    p.add_argument("--workers", type=int, help="worker processes (default: available CPUs)")
    _add_output(p)

    p = sub.add_parser("single", help="one model, one alpha, one bucket layout")
    _add_grid(p, require_single=True)
    _add_output(p)

    p = sub.add_parser("mc-check", help="compare Fourier ES with a Monte Carlo estimate")
    _add_grid(p)
    p.add_argument("--paths", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    _add_output(p)

    p = sub.add_parser("ingest", help="sample moments of non-overlapping log-returns")
    p.add_argument("--prices", required=True, metavar="CSV", help="file with header date,price")
    p.add_argument("--step", type=int, default=10, help="observations per return (default 10)")
    _add_output(p)
    return parser


def _grid_config(args) -> ex.ExperimentConfig:
    """Start from --config or the reference grid and apply flag overrides."""
    cfg = ex.load_config(args.config) if getattr(args, "config", None) else ex.reference_config()
    if args.model:
        cfg = replace(cfg, models=tuple(ex.parse_model(m) for m in args.model))
    if args.alpha:
        cfg = replace(cfg, alphas=_floats(args.alpha))
    if args.buckets or args.rho:
        horizons = _ints(args.buckets) if args.buckets else None
        rhos = _floats(args.rho) if args.rho else None
        layouts = []
        for lay in cfg.layouts:
            h = horizons or lay.columns[0][1].horizons
            r = rhos or tuple(float(label) for label, _ in lay.columns)
            layouts.append(ex.Layout.equicorrelated(f"h={tuple(h)}", h, r))
        if horizons:
            layouts = layouts[:1]
        cfg = replace(cfg, layouts=tuple(layouts))
    if args.tol is not None:
        cfg = replace(cfg, settings=replace(cfg.settings, b_stop_tol=args.tol))
    if args.format:
        cfg = replace(cfg, format=args.format)
    return cfg


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_run(args) -> int:
    cfg = _grid_config(args)
    run = ex.run_tables(cfg, workers=args.workers)
    _emit(ex.render_tables(run), args.out)
    return 0 if run.ok else 1


def _cmd_single(args) -> int:
    model = ex.parse_model(args.model[0])
    if len(args.model) > 1:
        raise ValueError("single takes one --model")
    alphas = _floats(args.alpha) if args.alpha else (0.975,)
    rhos = _floats(args.rho) if args.rho else (0.0,)
    if len(alphas) != 1 or len(rhos) != 1:
        raise ValueError("single takes one --alpha and one --rho")
    spec = LiquiditySpec.one_factor_per_bucket(_ints(args.buckets or DEFAULT_BUCKETS), rhos[0])
    settings = DEFAULT_SETTINGS
    if args.tol is not None:
        settings = replace(settings, b_stop_tol=args.tol)
    try:
        report = ex.run_single(model, alphas[0], spec, settings)
    except Exception as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    _emit(ex.render_single(report, args.format or "text"), args.out)
    return 0


def _cmd_mc(args) -> int:
    cfg = _grid_config(args)
    cells = ex.run_mc_check(cfg, args.paths, args.seed)
    _emit(ex.render_mc(cells, args.format or cfg.format), args.out)
    return 0 if not any(c.flagged for c in cells) else 1


def _cmd_ingest(args) -> int:
    series = read_price_csv(args.prices)
    returns = to_log_returns(series, args.step)
    mean, sd, kurt = sample_moments(returns)
    d = {"prices": len(series.prices), "step": args.step, "returns": len(returns.returns),
         "mean": mean, "sd": sd, "excess_kurtosis": kurt}
    fmt = args.format or "text"
    if fmt == "json":
        text = json.dumps(d, indent=2) + "\n"
    elif fmt == "csv":
        text = ",".join(d) + "\n" + ",".join(repr(v) for v in d.values()) + "\n"
    else:
        text = "\n".join(f"{k:<16}{v:.6g}" if isinstance(v, float) else f"{k:<16}{v}"
                         for k, v in d.items()) + "\n"
    _emit(text, args.out)
    return 0


_COMMANDS = {"run": _cmd_run, "single": _cmd_single, "mc-check": _cmd_mc, "ingest": _cmd_ingest}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
