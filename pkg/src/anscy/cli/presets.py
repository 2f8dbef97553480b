"""Named experiment presets, one per figure-style sweep."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..core import OutageConstraints, SystemConfig

# sweep kinds
CO_VALIDATE = "co-validate"
CO_TREND = "co-trend"
SO_VALIDATE = "so-validate"
SO_TREND = "so-trend"
THROUGHPUT = "throughput"


@dataclass(frozen=True)
class ExperimentSpec:
    """One experiment: a base configuration, a swept variable and optional curve family.

    ``ties`` keep intensities proportional to ``lambda_b`` (``lambda_u`` and
    ``lambda_e``) after every change of parameters; ``tau_follows_nt`` keeps the
    pilot length equal to the antenna count.
    """

    name: str
    kind: str
    description: str
    base: SystemConfig
    sweep_var: str
    grid: tuple
    series_var: str | None = None
    series: tuple = ()
    ties: tuple = ()
    tau_follows_nt: bool = False
    r_frac: float | None = None  # user distance as a fraction of r_c
    r_abs: float | None = None  # user distance in metres
    beta_db: float | None = None  # fixed threshold of trend experiments
    constraints: OutageConstraints = field(default_factory=OutageConstraints)
    trials: int = 100_000
    seed: int = 0
    out_path: str = ""

    def __post_init__(self):
        if not self.grid:
            raise ValueError(f"{self.name}: sweep grid is empty")
        if list(self.grid) != sorted(self.grid):
            raise ValueError(f"{self.name}: sweep grid must be sorted")

    def point_config(self, sweep_value=None, series_value=None, base: SystemConfig | None = None):
        """Config at one sweep point with ties applied."""
        cfg = base or self.base
        changes = {}
        for var, val in ((self.series_var, series_value), (self.sweep_var, sweep_value)):
            if var and val is not None and var in SystemConfig.field_names():
                changes[var] = int(val) if var in ("n_t", "tau") else float(val)
        lam_b = changes.get("lambda_b", cfg.lambda_b)
        for key, factor in self.ties:
            changes[key] = factor * lam_b
        if self.tau_follows_nt:
            changes["tau"] = changes.get("n_t", cfg.n_t)
        return cfg.with_(**changes) if changes else cfg

    def user_distance(self, cfg: SystemConfig) -> float | None:
        if self.r_abs is not None:
            return self.r_abs
        if self.r_frac is not None:
            return self.r_frac * cfg.r_c
        return None


def _lin(lo, hi, n):
    return tuple(float(v) for v in np.linspace(lo, hi, n))


def _logs(lo_exp, hi_exp, n):
    return tuple(float(v) for v in np.logspace(lo_exp, hi_exp, n))


_TIES = (("lambda_u", 10.0),)
_TIES_E = (("lambda_u", 10.0), ("lambda_e", 0.1))
_FIG4_LB = 1.0 / (16 * 200.0 ** 2)
_SPARSE = 1.0 / (16 * 300.0 ** 2)

# P_S = P_A = 15 dBm with an even split
_P15_TOT = 15.0 + 10.0 * math.log10(2.0)


def _build():
    fig2 = SystemConfig(n_t=3, tau=3, alpha=3.0, p_tot_dbm=30.0, phi=0.5, lambda_b=1e-4,
                        lambda_u=1e-3, lambda_e=0.0, r_c=200.0, n0_dbm=-50.0, p_tau_dbm=20.0)
    fig4 = SystemConfig(n_t=4, tau=4, alpha=3.0, p_tot_dbm=30.0, phi=0.5, lambda_b=_FIG4_LB,
                        lambda_u=10 * _FIG4_LB, lambda_e=2 * _FIG4_LB, r_c=300.0,
                        n0_dbm=-50.0, p_tau_dbm=20.0)
    fig5 = fig4.with_(lambda_e=_SPARSE)
    fig6 = SystemConfig(n_t=4, tau=4, alpha=3.0, p_tot_dbm=30.0, phi=0.5, lambda_b=_SPARSE,
                        lambda_u=10 * _SPARSE, lambda_e=_SPARSE / 10, r_c=300.0,
                        n0_dbm=-50.0, p_tau_dbm=30.0)
    fig7 = fig6.with_(p_tot_dbm=_P15_TOT, phi=0.5)
    fig8 = fig6.with_(phi=0.3)
    fig9 = SystemConfig(n_t=3, tau=3, alpha=3.0, p_tot_dbm=30.0, phi=0.3, lambda_b=1e-6,
                        lambda_u=1e-5, lambda_e=1e-7, r_c=100.0, n0_dbm=-50.0, p_tau_dbm=30.0)
    lam_family = (_SPARSE / 4, _SPARSE / 2, _SPARSE)
    specs = [
        ExperimentSpec("fig2-co-validate", CO_VALIDATE,
                       "connection outage, its lower bound and Monte Carlo versus beta_bs",
                       fig2, "beta_bs_db", _lin(-5, 20, 26), ties=_TIES, r_frac=0.25),
        ExperimentSpec("fig3-co-vs-lambdaB", CO_TREND,
                       "connection outage versus BS intensity for several cell radii",
                       fig2.with_(n0_dbm=-70.0), "lambda_b", _logs(-6, -4, 9),
                       series_var="r_c", series=(100.0, 200.0, 300.0), ties=_TIES,
                       r_abs=50.0, beta_db=10.0),
        ExperimentSpec("fig4-so-validate", SO_VALIDATE,
                       "secrecy outage bounds and Monte Carlo versus beta_e",
                       fig4, "beta_e_db", _lin(-10, 10, 21),
                       ties=(("lambda_u", 10.0), ("lambda_e", 2.0))),
        ExperimentSpec("fig5-so-vs-lambdaB", SO_TREND,
                       "secrecy outage versus BS intensity for several antenna counts",
                       fig5, "lambda_b", _logs(-7, -5, 9), series_var="n_t", series=(2, 4, 6, 8),
                       ties=_TIES, tau_follows_nt=True, beta_db=0.0),
        ExperimentSpec("fig6-mu-vs-phi", THROUGHPUT,
                       "secrecy throughput versus power split for several BS intensities",
                       fig6, "phi", _lin(0.05, 0.95, 19), series_var="lambda_b",
                       series=lam_family, ties=_TIES_E),
        ExperimentSpec("fig7-mu-vs-ptau", THROUGHPUT,
                       "secrecy throughput versus pilot power for several BS intensities",
                       fig7, "p_tau_dbm", _lin(0, 40, 9), series_var="lambda_b",
                       series=lam_family, ties=_TIES_E),
        ExperimentSpec("fig8-mu-vs-nt", THROUGHPUT,
                       "secrecy throughput versus antenna count for several BS intensities",
                       fig8, "n_t", tuple(range(2, 9)), series_var="lambda_b",
                       series=lam_family, ties=_TIES_E, tau_follows_nt=True),
        ExperimentSpec("fig9-edge-user", THROUGHPUT,
                       "secrecy throughput of a cell-edge user versus BS intensity",
                       fig9, "lambda_b", _logs(-7, -4, 4), series_var="p_tot_dbm",
                       series=(20.0, 30.0, 40.0), ties=_TIES_E, r_frac=1.0 - 1e-3),
    ]
    return {s.name: s for s in specs}


PRESETS = _build()
