"""Per-user channel-estimation quality and the derived outage scalars."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ..core import SystemConfig


class AnalysisError(RuntimeError):
    """An evaluator produced a value that fails its internal consistency check."""


@dataclass(frozen=True)
class EstimationContext:
    """Quantities shared by the connection-outage evaluators for one user distance.

    ``mu_s`` is the normalised SINR threshold for ``beta_bs``; ``r_u`` the radius
    of the interferer-free ball around the user.
    """

    r: float
    delta2: float
    r_u: float
    mu_s: float
    p_i: float
    lambda_b_hat: float
    beta_bs: float = 0.0

    @property
    def mu_per_beta(self) -> float:
        return self.mu_s / self.beta_bs if self.beta_bs > 0 else math.nan

    def with_beta(self, cfg: SystemConfig, beta_bs: float) -> "EstimationContext":
        return replace(self, beta_bs=float(beta_bs),
                       mu_s=threshold_scale(cfg, self.r, self.delta2, beta_bs))


def threshold_scale(cfg: SystemConfig, r, delta2, beta_bs):
    """beta * r^alpha / (P_S * delta^2); infinite when no signal power is left."""
    r = np.asarray(r, dtype=float)
    beta = np.asarray(beta_bs, dtype=float)
    if cfg.p_s == 0:
        out = np.where(beta > 0, np.inf, 0.0)
    else:
        out = beta * r ** cfg.alpha / (cfg.p_s * np.asarray(delta2, dtype=float))
    return float(out) if out.ndim == 0 else out


def delta2_array(cfg: SystemConfig, r):
    """MMSE estimation quality for users at distances ``r`` (vectorised)."""
    r = np.asarray(r, dtype=float)
    train = cfg.p_tau * cfg.tau
    own = train * r ** (-cfg.alpha)
    return own / (cfg.n0 + train * cfg.pilot_contamination_sum() + own)


def residual_power_array(cfg: SystemConfig, r, delta2):
    """Estimation-error self-interference plus noise, (1 - delta^2) P_tot r^-alpha + N0."""
    r = np.asarray(r, dtype=float)
    return (1.0 - delta2) * cfg.p_tot * r ** (-cfg.alpha) + cfg.n0


def _check_r(cfg, r):
    r = np.asarray(r, dtype=float)
    if np.any(~(r > 0)) or np.any(r >= cfg.r_c):
        raise ValueError(f"user distance must satisfy 0 < r < r_c={cfg.r_c}")
    return r


def estimation_quality(cfg: SystemConfig, r: float, beta_bs: float = 0.0) -> EstimationContext:
    r = float(_check_r(cfg, r))
    d2 = float(delta2_array(cfg, r))
    return EstimationContext(
        r=r,
        delta2=d2,
        r_u=cfg.r_c - r,
        mu_s=threshold_scale(cfg, r, d2, beta_bs),
        p_i=float(residual_power_array(cfg, r, d2)),
        lambda_b_hat=cfg.lambda_b_hat,
        beta_bs=float(beta_bs),
    )
