"""Experiment grids: configuration, dispatch over (model, alpha, layout) cells, and rendering."""

from __future__ import annotations

import configparser
import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from decimal import ROUND_HALF_EVEN, Decimal
from typing import Callable, Sequence

import numpy as np

from .distributions import CharacteristicGenerator, Family, GHParams, make_generator, power_generator
from .fourier import DEFAULT_SETTINGS, InversionSettings, expected_shortfall
from .liquidity import LiquiditySpec, RiskReport, loss_generator, scaling_ratio
from .montecarlo import estimate_loss_es

__all__ = [
    "Layout",
    "ExperimentConfig",
    "CellResult",
    "TableRun",
    "McCell",
    "parse_model",
    "load_config",
    "config_from_dict",
    "config_from_ini",
    "reference_config",
    "run_tables",
    "run_single",
    "run_mc_check",
    "render_tables",
    "render_single",
    "render_mc",
    "round3",
]

FORMATS = ("text", "csv", "json")


def round3(x: float) -> str:
    """Half-even rounding to three decimals of the shortest repr of ``x``."""
    if x is None or not math.isfinite(x):
        return "nan"
    return str(Decimal(repr(float(x))).quantize(Decimal("0.001"), rounding=ROUND_HALF_EVEN))


# --------------------------------------------------------------------------
# configuration


def parse_model(text: str) -> GHParams:
    """Parse ``gauss``, ``t:NU``, ``vg:LAMBDA``, ``nig:THETA``, ``hyp:THETA`` or ``gig:LAMBDA,CHI,KAPPA``."""
    name, _, args = text.strip().partition(":")
    name = name.lower()
    vals = [float(v) for v in args.split(",")] if args else []
    builders = {
        "gauss": (GHParams.gauss, 0),
        "t": (GHParams.student_t, 1),
        "vg": (GHParams.vg, 1),
        "nig": (GHParams.nig, 1),
        "hyp": (GHParams.hyp, 1),
        "gig": (GHParams.gig, 3),
    }
    if name not in builders:
        raise ValueError(f"unknown model family {name!r}; expected one of {sorted(builders)}")
    build, arity = builders[name]
    if len(vals) != arity:
        raise ValueError(f"model {name!r} takes {arity} parameter(s), got {text!r}")
    return build(*vals)


def _model_from_dict(d: dict) -> GHParams:
    fam = str(d.get("family", "")).lower()
    if fam == "gauss":
        return GHParams.gauss()
    if fam == "t":
        return GHParams.student_t(d["nu"] if "nu" in d else -2 * d["lambda"])
    if fam == "vg":
        return GHParams.vg(d["lambda"])
    if fam == "nig":
        return GHParams.nig(d["theta"])
    if fam == "hyp":
        return GHParams.hyp(d["theta"])
    if fam == "gig":
        return GHParams.gig(d["lambda"], d["chi"], d["kappa"])
    raise ValueError(f"unknown model family {fam!r}")


def _model_to_dict(p: GHParams) -> dict:
    fam = p.family
    if fam is Family.GAUSS:
        return {"family": "gauss"}
    if fam is Family.STUDENT_T:
        return {"family": "t", "nu": p.nu}
    if fam is Family.VG:
        return {"family": "vg", "lambda": p.lam}
    if fam in (Family.NIG, Family.HYP):
        return {"family": fam.value, "theta": p.theta}
    return {"family": "gig", "lambda": p.lam, "chi": p.chi, "kappa": p.kappa}


@dataclass(frozen=True)
class Layout:
    """A named bucket layout with one column per dispersion choice."""

    name: str
    columns: tuple  # of (label, LiquiditySpec)

    @classmethod
    def equicorrelated(cls, name: str, horizons: Sequence[int], rhos: Sequence[float]) -> "Layout":
        if len(horizons) == 1:
            # a single factor has no correlation to vary
            rhos = (0.0,)
        return cls(name, tuple((f"{r:g}", LiquiditySpec.one_factor_per_bucket(horizons, r))
                               for r in rhos))


@dataclass(frozen=True)
class ExperimentConfig:
    models: tuple
    alphas: tuple
    layouts: tuple
    settings: InversionSettings = DEFAULT_SETTINGS
    format: str = "text"

    def __post_init__(self):
        if not self.models or not self.alphas or not self.layouts:
            raise ValueError("config needs at least one model, alpha and layout")
        for a in self.alphas:
            if not 0.5 < a < 1:
                raise ValueError(f"alpha {a} outside (0.5, 1)")
        if self.format not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}")


def reference_config(fmt: str = "text") -> ExperimentConfig:
    """Gauss plus four GH shapes fitted to two-weekly S&P 500 returns, on FRTB horizons."""
    return ExperimentConfig(
        models=(
            GHParams.gauss(),
            GHParams.student_t(2.92),
            GHParams.vg(0.95),
            GHParams.hyp(0.11),
            GHParams.nig(0.49),
        ),
        alphas=(0.95, 0.975, 0.99),
        layouts=(
            Layout.equicorrelated("two risk factors, h=(1,2)", (1, 2), (0.0, 0.5)),
            Layout.equicorrelated("five risk factors, h=(1,2,4,6,12)", (1, 2, 4, 6, 12), (0.0, 0.5)),
        ),
        format=fmt,
    )


def _layout_from_dict(d: dict) -> Layout:
    horizons = [int(h) for h in d["horizons"]]
    name = d.get("name", f"h={tuple(horizons)}")
    if "dispersion" in d:
        weights = d.get("weights", np.eye(len(horizons)).tolist())
        spec = LiquiditySpec(tuple(horizons), np.array(weights, dtype=float),
                             np.array(d["dispersion"], dtype=float))
        return Layout(name, ((d.get("label", "custom"), spec),))
    rhos = d.get("rho", [0.0])
    if not isinstance(rhos, list):
        rhos = [rhos]
    return Layout.equicorrelated(name, horizons, [float(r) for r in rhos])


def config_from_dict(d: dict) -> ExperimentConfig:
    """Build a config from a plain mapping (the JSON config document)."""
    known = {f.name for f in fields(InversionSettings)}
    overrides = dict(d.get("inversion", {}))
    unknown = set(overrides) - known
    if unknown:
        raise ValueError(f"unknown inversion settings {sorted(unknown)}")
    return ExperimentConfig(
        models=tuple(_model_from_dict(m) if isinstance(m, dict) else parse_model(m)
                     for m in d["models"]),
        alphas=tuple(float(a) for a in d["alphas"]),
        layouts=tuple(_layout_from_dict(s) for s in d["layouts"]),
        settings=InversionSettings(**overrides),
        format=d.get("format", "text"),
    )


def _floats(text: str) -> list:
    return [float(v) for v in text.replace(";", ",").split(",") if v.strip()]


def _matrix(text: str) -> list:
    return [_floats(row) for row in text.split(";") if row.strip()]


def config_from_ini(text: str) -> ExperimentConfig:
    """Parse the sectioned key-value config format.

    ``[run]`` holds ``alphas`` and ``format``; each ``[model NAME]`` section
    holds ``family`` plus its parameters; each ``[layout NAME]`` section holds
    ``horizons`` and either ``rho`` (a list) or ``dispersion`` (rows separated
    by ``;``) with optional ``weights`` and ``label``; ``[inversion]`` overrides
    numerical settings.
    """
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    parser.read_string(text)
    d = {"models": [], "layouts": [], "inversion": {}}
    run = parser["run"] if parser.has_section("run") else {}
    if "alphas" not in run:
        raise ValueError("config needs 'alphas' in the [run] section")
    d["alphas"] = _floats(run["alphas"])
    d["format"] = run.get("format", "text")
    for name in parser.sections():
        sec = parser[name]
        kind, _, title = name.partition(" ")
        if kind == "model":
            m = {"family": sec.get("family", title)}
            for key in ("nu", "lambda", "chi", "kappa", "theta"):
                if key in sec:
                    m[key] = float(sec[key])
            d["models"].append(m)
        elif kind == "layout":
            lay = {"name": title.strip() or name, "horizons": [int(h) for h in _floats(sec["horizons"])]}
            if "dispersion" in sec:
                lay["dispersion"] = _matrix(sec["dispersion"])
                if "weights" in sec:
                    lay["weights"] = _matrix(sec["weights"])
                lay["label"] = sec.get("label", "custom")
            else:
                lay["rho"] = _floats(sec.get("rho", "0"))
            d["layouts"].append(lay)
        elif kind == "inversion":
            d["inversion"] = {k: (int(v) if k == "max_iter" else float(v)) for k, v in sec.items()}
        elif kind != "run":
            raise ValueError(f"unknown config section [{name}]")
    return config_from_dict(d)


def load_config(path) -> ExperimentConfig:
    """Load an INI-style config, or JSON when the file ends in ``.json``."""
    text = open(path).read()
    if str(path).endswith(".json"):
        return config_from_dict(json.loads(text))
    return config_from_ini(text)


def config_to_dict(cfg: ExperimentConfig) -> dict:
    layouts = []
    for lay in cfg.layouts:
        spec0 = lay.columns[0][1]
        layouts.append({"name": lay.name, "horizons": list(spec0.horizons),
                        "columns": [label for label, _ in lay.columns]})
    return {
        "models": [_model_to_dict(m) for m in cfg.models],
        "alphas": list(cfg.alphas),
        "layouts": layouts,
        "inversion": asdict(cfg.settings),
    }


# --------------------------------------------------------------------------
# tables


@dataclass(frozen=True)
class CellResult:
    model_index: int
    alpha: float
    layout_index: int
    column: str
    report: RiskReport | None = None
    error: str | None = None


@dataclass
class TableRun:
    config: ExperimentConfig
    cells: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.error is None for c in self.cells)

    def get(self, model_index, alpha, layout_index, column) -> CellResult:
        for c in self.cells:
            if (c.model_index, c.alpha, c.layout_index, c.column) == (model_index, alpha, layout_index, column):
                return c
        raise KeyError((model_index, alpha, layout_index, column))


def _run_model_alpha(task):
    """All layouts for one (model, alpha); ``ES(Z)`` is shared per distinct ``h_1``."""
    mi, params, alpha, layouts, settings = task
    out = []
    g = make_generator(params)
    base_cache = {}
    for li, lay in enumerate(layouts):
        for label, spec in lay.columns:
            h1 = spec.horizons[0]
            try:
                if h1 not in base_cache:
                    base_cache[h1] = expected_shortfall(power_generator(g, h1), alpha, settings)
                rep = scaling_ratio(spec, g, alpha, settings, es_base=base_cache[h1],
                                    label=params.label)
                out.append(CellResult(mi, alpha, li, label, report=rep))
            except Exception as exc:  # report per cell, keep going
                out.append(CellResult(mi, alpha, li, label, error=f"{type(exc).__name__}: {exc}"))
    return out


def run_tables(config: ExperimentConfig, workers: int | None = None) -> TableRun:
    """Evaluate every (model, alpha, layout, column) cell of the grid.

    Cells are grouped per (model, alpha) and spread over a process pool of
    ``workers`` (default: available CPUs); output order is the grid order
    regardless of completion order.
    """
    tasks = [(mi, m, a, config.layouts, config.settings)
             for mi, m in enumerate(config.models) for a in config.alphas]
    workers = _worker_count(workers, len(tasks))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_model_alpha, tasks))
    else:
        results = [_run_model_alpha(t) for t in tasks]
    run = TableRun(config)
    for group in results:
        run.cells.extend(group)
    return run


def _worker_count(workers, n_tasks):
    if workers is None:
        try:
            workers = len(os.sched_getaffinity(0))
        except AttributeError:
            workers = os.cpu_count() or 1
    return max(1, min(int(workers), n_tasks))


def _table_rows(run: TableRun):
    """Long-form rows, one per cell, in grid order."""
    cfg = run.config
    rows = []
    for li, lay in enumerate(cfg.layouts):
        for mi, model in enumerate(cfg.models):
            for a in cfg.alphas:
                for label, _ in lay.columns:
                    c = run.get(mi, a, li, label)
                    r = c.report
                    rows.append({
                        "layout": lay.name,
                        "model": model.label,
                        "alpha": a,
                        "column": label,
                        "c_base": r.c_base if r else None,
                        "c_agg": r.c_agg if r else None,
                        "ratio": r.ratio if r else None,
                        "es_basel": r.es_basel if r else None,
                        "es_generalized": r.es_generalized if r else None,
                        "error": c.error,
                    })
    return rows


def render_tables(run: TableRun, fmt: str | None = None) -> str:
    fmt = fmt or run.config.format
    rows = _table_rows(run)
    if fmt == "json":
        return json.dumps({"config": config_to_dict(run.config), "cells": rows}, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: (repr(v) if isinstance(v, float) else ("" if v is None else v))
                             for k, v in row.items()})
        return buf.getvalue()
    return _render_text(run)


def _render_text(run: TableRun) -> str:
    cfg = run.config
    quantities = (("c_base", "c_{a,psi_1}"), ("c_agg", "c_{a,psi_L}"), ("ratio", "r_a"))
    lines = []
    for li, lay in enumerate(cfg.layouts):
        cols = [label for label, _ in lay.columns]
        width = 8
        lines.append(lay.name)
        head1 = f"{'':<16}{'alpha':<14}" + "".join(
            f"{a:^{width * len(cols)}g}" for a in cfg.alphas)
        head2 = f"{'Model':<16}{'Quantity | rho':<14}" + "".join(
            f"{c:>{width}}" for _ in cfg.alphas for c in cols)
        lines += [head1, head2, "-" * len(head2)]
        for mi, model in enumerate(cfg.models):
            for qi, (attr, qname) in enumerate(quantities):
                cells = []
                for a in cfg.alphas:
                    for c in cols:
                        cell = run.get(mi, a, li, c)
                        cells.append(round3(getattr(cell.report, attr)) if cell.report else "ERR")
                name = model.label if qi == 0 else ""
                lines.append(f"{name:<16}{qname:<14}" + "".join(f"{v:>{width}}" for v in cells))
        lines.append("")
    errors = [c for c in run.cells if c.error]
    for c in errors:
        lines.append(f"error in {cfg.models[c.model_index].label}, alpha={c.alpha}, "
                     f"{cfg.layouts[c.layout_index].name}, column {c.column}: {c.error}")
    return "\n".join(lines).rstrip() + "\n"


# --------------------------------------------------------------------------
# single query


def run_single(model: GHParams, alpha: float, spec: LiquiditySpec,
               settings: InversionSettings = DEFAULT_SETTINGS) -> RiskReport:
    return scaling_ratio(spec, make_generator(model), alpha, settings, label=model.label)


def render_single(report: RiskReport, fmt: str = "text") -> str:
    if fmt == "json":
        return json.dumps(report.as_dict(), indent=2) + "\n"
    if fmt == "csv":
        d = report.as_dict()
        d["es_components"] = ";".join(repr(x) for x in d["es_components"])
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(d), lineterminator="\n")
        writer.writeheader()
        writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in d.items()})
        return buf.getvalue()
    comps = ", ".join(f"{x:.6g}" for x in report.es_components)
    return "\n".join([
        f"model            {report.model}",
        f"alpha            {report.alpha:g}",
        f"layout           {report.spec}",
        f"c_base           {round3(report.c_base)}",
        f"c_agg            {round3(report.c_agg)}",
        f"ratio            {round3(report.ratio)}",
        f"ES components    {comps}",
        f"ES Basel         {report.es_basel:.6g}",
        f"ES generalized   {report.es_generalized:.6g}",
        f"overstatement    {round(100 * report.overstatement, 1) + 0.0:.1f}%",
    ]) + "\n"


# --------------------------------------------------------------------------
# Monte Carlo cross-check


@dataclass(frozen=True)
class McCell:
    model: str
    alpha: float
    layout: str
    column: str
    fourier_es: float | None
    mc_es: float | None
    std_error: float | None
    error: str | None = None

    @property
    def z(self) -> float | None:
        if self.error or not self.std_error:
            return None
        return (self.mc_es - self.fourier_es) / self.std_error

    @property
    def flagged(self) -> bool:
        return self.error is not None or abs(self.z) > 3.0


def run_mc_check(config: ExperimentConfig, paths: int, seed: int,
                 generator_hook: Callable[[CharacteristicGenerator], CharacteristicGenerator] | None = None,
                 ) -> list:
    """Compare Fourier ``ES(L)`` with a simulated estimate for every grid cell.

    ``generator_hook`` transforms the single-step generator before inversion;
    it exists to inject deliberate errors when testing the harness.
    """
    if paths < 10_000:
        raise ValueError("use at least 10^4 paths")
    out = []
    for model in config.models:
        g = make_generator(model)
        if generator_hook is not None:
            g = generator_hook(g)
        for lay in config.layouts:
            for label, spec in lay.columns:
                lg = loss_generator(spec, g)
                for a in config.alphas:
                    try:
                        f_es = expected_shortfall(lg, a, config.settings)
                        mc_es, se = estimate_loss_es(spec, model, a, paths, seed)
                        out.append(McCell(model.label, a, lay.name, label, f_es, mc_es, se))
                    except Exception as exc:
                        out.append(McCell(model.label, a, lay.name, label, None, None, None,
                                          error=f"{type(exc).__name__}: {exc}"))
    return out


def render_mc(cells: list, fmt: str = "text") -> str:
    rows = [{
        "model": c.model, "layout": c.layout, "column": c.column, "alpha": c.alpha,
        "fourier_es": c.fourier_es, "mc_es": c.mc_es, "std_error": c.std_error,
        "z": c.z, "flagged": c.flagged, "error": c.error,
    } for c in cells]
    if fmt == "json":
        return json.dumps(rows, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow({k: repr(v) if isinstance(v, float) else ("" if v is None else v)
                             for k, v in r.items()})
        return buf.getvalue()
    lines = [f"{'model':<16}{'layout':<36}{'col':>5}{'alpha':>7}{'fourier':>12}{'MC':>12}{'SE':>10}{'z':>8}"]
    for r in rows:
        if r["error"]:
            lines.append(f"{r['model']:<16}{r['layout']:<36}{r['column']:>5}{r['alpha']:>7g}  ERROR {r['error']}")
            continue
        mark = "  <-- |z| > 3" if r["flagged"] else ""
        lines.append(f"{r['model']:<16}{r['layout']:<36}{r['column']:>5}{r['alpha']:>7g}"
                     f"{r['fourier_es']:>12.5f}{r['mc_es']:>12.5f}{r['std_error']:>10.5f}{r['z']:>8.2f}{mark}")
    return "\n".join(lines) + "\n"
