"""Run a preset sweep and write its CSV table, gnuplot script and timing sidecar."""
from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .. import montecarlo as mc
from ..analysis.connection import connection_outage_array
from ..analysis.secrecy import secrecy_outage_lower, secrecy_outage_upper
from ..core import SystemConfig, db_to_linear
from ..throughput import secrecy_throughput
from .presets import CO_TREND, CO_VALIDATE, SO_TREND, SO_VALIDATE, THROUGHPUT, ExperimentSpec

NAN = float("nan")


@dataclass
class ExperimentResult:
    csv_path: Path
    columns: list
    rows: list
    wall_times: list
    any_feasible: bool


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return "%.17g" % float(v)


def _to_db(x: float) -> float:
    if x <= 0:
        return -math.inf
    return 10.0 * math.log10(x)


def _mc_pair(est):
    return (est.p_hat, est.ci_half_width_95) if est is not None else (NAN, NAN)


def _co_validate(spec, cfg, opts):
    r = spec.user_distance(cfg)
    betas = db_to_linear(np.asarray(spec.grid))
    t0 = time.perf_counter()
    p = connection_outage_array(cfg, r, betas)
    lo = connection_outage_array(cfg, r, betas, lower_bound=True)
    t_an = (time.perf_counter() - t0) / len(betas)
    ests = [None] * len(betas)
    t_mc = 0.0
    if opts["mc"]:
        t0 = time.perf_counter()
        ests = mc.simulate_connection_outage(cfg, r, list(betas), opts["trials"], opts["seed"],
                                             vector_channels=opts["vector"])
        t_mc = (time.perf_counter() - t0) / len(betas)
    cols = ["beta_bs_db", "beta_bs", "r", "p_co_analytic", "p_co_lower", "p_co_mc", "ci"]
    rows = [[db, b, r, pa, pl, *_mc_pair(e)]
            for db, b, pa, pl, e in zip(spec.grid, betas, p, lo, ests)]
    return cols, rows, [t_an + t_mc] * len(rows), True


def _so_validate(spec, cfg, opts):
    betas = db_to_linear(np.asarray(spec.grid))
    rows, times = [], []
    ests = [None] * len(betas)
    t_mc = 0.0
    if opts["mc"]:
        t0 = time.perf_counter()
        ests = mc.simulate_secrecy_outage(cfg, list(betas), opts["trials"], opts["seed"],
                                          vector_channels=opts["vector"])
        t_mc = (time.perf_counter() - t0) / len(betas)
    for db, b, e in zip(spec.grid, betas, ests):
        t0 = time.perf_counter()
        up = secrecy_outage_upper(cfg, b)
        lo = secrecy_outage_lower(cfg, b)
        times.append(time.perf_counter() - t0 + t_mc)
        rows.append([db, b, up, lo, *_mc_pair(e)])
    return ["beta_e_db", "beta_e", "p_so_upper", "p_so_lower", "p_so_mc", "ci"], rows, times, True


def _points(spec, cfg):
    series = spec.series if spec.series_var else (None,)
    for s in series:
        for x in spec.grid:
            yield s, x, spec.point_config(x, s, base=cfg)


def _co_trend(spec, cfg, opts):
    beta = db_to_linear(spec.beta_db)
    rows, times = [], []
    for s, x, pc in _points(spec, cfg):
        t0 = time.perf_counter()
        r = spec.user_distance(pc)
        pa = float(connection_outage_array(pc, r, beta))
        pl = float(connection_outage_array(pc, r, beta, lower_bound=True))
        est = None
        if opts["mc"]:
            est = mc.simulate_connection_outage(pc, r, beta, opts["trials"], opts["seed"],
                                                vector_channels=opts["vector"])
        times.append(time.perf_counter() - t0)
        rows.append([s, x, spec.beta_db, r, pa, pl, *_mc_pair(est)])
    cols = [spec.series_var, spec.sweep_var, "beta_bs_db", "r", "p_co_analytic", "p_co_lower",
            "p_co_mc", "ci"]
    return cols, rows, times, True


def _so_trend(spec, cfg, opts):
    beta = db_to_linear(spec.beta_db)
    rows, times = [], []
    for s, x, pc in _points(spec, cfg):
        t0 = time.perf_counter()
        up = secrecy_outage_upper(pc, beta)
        lo = secrecy_outage_lower(pc, beta)
        est = None
        if opts["mc"]:
            est = mc.simulate_secrecy_outage(pc, beta, opts["trials"], opts["seed"],
                                             vector_channels=opts["vector"])
        times.append(time.perf_counter() - t0)
        rows.append([s, x, spec.beta_db, up, lo, *_mc_pair(est)])
    cols = [spec.series_var, spec.sweep_var, "beta_e_db", "p_so_upper", "p_so_lower",
            "p_so_mc", "ci"]
    return cols, rows, times, True


def _throughput_point(args):
    pc, constraints, r = args
    t0 = time.perf_counter()
    sol = secrecy_throughput(pc, constraints, r=r)
    return sol, time.perf_counter() - t0


def _throughput(spec, cfg, opts):
    pts = list(_points(spec, cfg))
    jobs = [(pc, spec.constraints, spec.user_distance(pc)) for _, _, pc in pts]
    workers = min(mc.worker_count(opts.get("workers")), len(jobs))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            solved = list(pool.map(_throughput_point, jobs))
    else:
        solved = [_throughput_point(j) for j in jobs]
    rows, times = [], []
    any_feasible = False
    for (s, x, pc), (sol, dt), (_, _, r) in zip(pts, solved, jobs):
        co = so = None
        t0 = time.perf_counter()
        if opts["mc"] and sol.feasible:
            if r is None:
                co = mc.simulate_avg_connection_outage(pc, sol.beta_bs_star, opts["trials"], opts["seed"])
            else:
                co = mc.simulate_connection_outage(pc, r, sol.beta_bs_star, opts["trials"], opts["seed"],
                                                   vector_channels=opts["vector"])
            if pc.lambda_e > 0 and sol.beta_e_star > 0:
                so = mc.simulate_secrecy_outage(pc, sol.beta_e_star, opts["trials"], opts["seed"],
                                                vector_channels=opts["vector"])
        times.append(dt + time.perf_counter() - t0)
        any_feasible |= sol.feasible
        rows.append([s, x, _to_db(sol.beta_bs_star), _to_db(sol.beta_e_star), sol.mu, sol.p_us,
                     bool(sol.feasible), *_mc_pair(co), *_mc_pair(so)])
    cols = [spec.series_var, spec.sweep_var, "beta_bs_star_db", "beta_e_star_db", "mu", "p_us",
            "feasible", "p_co_mc", "ci_co", "p_so_mc", "ci_so"]
    if spec.series_var is None:
        cols, rows = cols[1:], [row[1:] for row in rows]
    return cols, rows, times, any_feasible


_KINDS = {CO_VALIDATE: _co_validate, SO_VALIDATE: _so_validate, CO_TREND: _co_trend,
          SO_TREND: _so_trend, THROUGHPUT: _throughput}


def _gnuplot(spec: ExperimentSpec, csv_name: str, columns) -> str:
    x = columns[1] if spec.series_var else columns[0]
    ys = {CO_VALIDATE: ["p_co_analytic", "p_co_lower", "p_co_mc"],
          CO_TREND: ["p_co_analytic", "p_co_mc"],
          SO_VALIDATE: ["p_so_upper", "p_so_lower", "p_so_mc"],
          SO_TREND: ["p_so_upper", "p_so_mc"],
          THROUGHPUT: ["mu"]}[spec.kind]
    lines = [
        f"# {spec.name}: {spec.description}",
        "set datafile separator ','",
        "set key autotitle columnhead",
        f"set xlabel '{x}'",
    ]
    if x in ("lambda_b",):
        lines.append("set logscale x")
    plots = []
    for y in ys:
        if spec.series_var:
            for s in spec.series:
                sel = f"(column('{spec.series_var}')=={s!r} ? column('{y}') : NaN)"
                plots.append(f"'{csv_name}' using '{x}':{sel} with linespoints title '{y} {spec.series_var}={s}'")
        else:
            plots.append(f"'{csv_name}' using '{x}':'{y}' with linespoints title '{y}'")
    lines.append("plot " + ", \\\n     ".join(plots))
    return "\n".join(lines) + "\n"


def run_experiment(spec: ExperimentSpec, cfg: SystemConfig | None = None, mc_enabled: bool = True,
                   vector_channels: bool = False, workers=None) -> ExperimentResult:
    """Evaluate every sweep point and write ``out_path`` plus its ``.gp`` and timing files.

    The CSV holds only deterministic values, so equal seeds give byte-identical
    files; wall-clock times go to the ``.timing.json`` sidecar.
    """
    cfg = cfg or spec.base
    out = Path(spec.out_path or f"{spec.name}.csv")
    opts = {"mc": mc_enabled, "trials": spec.trials, "seed": spec.seed,
            "vector": vector_channels, "workers": workers}
    t0 = time.perf_counter()
    base = spec.point_config(base=cfg)
    columns, rows, times, any_feasible = _KINDS[spec.kind](spec, base, opts)
    total = time.perf_counter() - t0
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    out.with_suffix(".gp").write_text(_gnuplot(spec, out.name, columns))
    timing = {"experiment": spec.name, "total_seconds": total, "row_seconds": times}
    Path(str(out) + ".timing.json").write_text(json.dumps(timing, indent=2) + "\n")
    return ExperimentResult(out, columns, rows, times, any_feasible)


def with_overrides(spec: ExperimentSpec, overrides: dict, **fields) -> ExperimentSpec:
    """Preset with user config overrides; ties to lambda_b are dropped for keys set explicitly."""
    base = spec.base.with_(**overrides) if overrides else spec.base
    ties = tuple((k, f) for k, f in spec.ties if k not in overrides)
    tau_nt = spec.tau_follows_nt and "tau" not in overrides
    return replace(spec, base=base, ties=ties, tau_follows_nt=tau_nt, **fields)
