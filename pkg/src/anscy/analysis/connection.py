"""Connection outage of a user in the target cell under the small-ball model."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..core import SystemConfig
from .estimation import (AnalysisError, EstimationContext, delta2_array,
                         residual_power_array, threshold_scale)
from .interference import config_power_model, laplace_psi_arrays

CONSISTENCY_TOL = 1e-9


@dataclass(frozen=True)
class Theorem1Scratch:
    """Per-call intermediates of the outage evaluation, kept for inspection."""

    kappa: float
    delta_exp: float
    psi: np.ndarray
    q_matrix: np.ndarray
    x_terms: np.ndarray
    laplace: float


def alzer_kappa(n: int) -> float:
    return math.factorial(n) ** (-1.0 / n)


def toeplitz_q(psi):
    """Strictly lower-triangular Toeplitz matrices with ``psi[..., k-1]`` on the
    k-th sub-diagonal; ``psi`` has shape (..., N-1) and the result (..., N, N)."""
    psi = np.asarray(psi, dtype=float)
    n = psi.shape[-1] + 1
    q = np.zeros(psi.shape[:-1] + (n, n))
    for i in range(1, n):
        for j in range(i):
            q[..., i, j] = psi[..., i - j - 1]
    return q


def derivative_terms_matrix(psi, laplace):
    """x_p = [sum_{m>=1} Q^m / m!](p, 0) * L for p >= 1 and x_0 = L."""
    q = toeplitz_q(psi)
    n = q.shape[-1]
    acc = np.zeros_like(q)
    power = np.broadcast_to(np.eye(n), q.shape).copy()
    for m in range(1, n):
        power = power @ q / m
        acc += power
    x = acc[..., :, 0] * np.asarray(laplace)[..., None]
    x[..., 0] = laplace
    return x


def derivative_terms_recurrence(psi, laplace):
    """Same terms from x_p = sum_{j<p} (p-j)/p * Psi_{p-j} * x_j."""
    psi = np.asarray(psi, dtype=float)
    n = psi.shape[-1] + 1
    x = np.zeros(psi.shape[:-1] + (n,))
    x[..., 0] = laplace
    for p in range(1, n):
        for j in range(p):
            x[..., p] += (p - j) / p * psi[..., p - j - 1] * x[..., j]
    return x


def _outage_from_terms(mu_pi, x_terms):
    """1 - exp(-mu P_I) sum_k sum_{p<=k} (mu P_I)^(k-p) x_p / (k-p)!."""
    n = x_terms.shape[-1]
    total = np.zeros(np.shape(mu_pi))
    for p in range(n):
        poly = np.zeros_like(total)
        term = np.ones_like(total)
        for j in range(n - p):
            if j:
                term = term * mu_pi / j
            poly += term
        total += x_terms[..., p] * poly
    return 1.0 - np.exp(-mu_pi) * total


def _check_window(p, what):
    p = np.asarray(p, dtype=float)
    bad = (p < -CONSISTENCY_TOL) | (p > 1 + CONSISTENCY_TOL) | ~np.isfinite(p)
    if np.any(bad):
        raise AnalysisError(f"{what} left [0, 1] beyond tolerance: {p[bad][:5].tolist()}")
    return np.clip(p, 0.0, 1.0)


def connection_outage_array(cfg: SystemConfig, r, beta_bs, lower_bound=False,
                            return_scratch=False):
    """Small-ball connection outage for broadcastable arrays of user distance and
    SINR threshold. With ``lower_bound`` the Gamma-CDF lower bound form is used.
    """
    r, beta = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(beta_bs, dtype=float))
    if np.any(beta < 0):
        raise ValueError("beta_bs must be non-negative")
    if np.any(~(r > 0)) or np.any(r >= cfg.r_c):
        raise ValueError("user distance must satisfy 0 < r < r_c")
    shape = r.shape
    r, beta = r.ravel(), beta.ravel()
    out = np.zeros(r.size)
    if cfg.p_s == 0:
        out[beta > 0] = 1.0
        return out.reshape(shape)
    n = cfg.n_t
    d2 = delta2_array(cfg, r)
    mu = threshold_scale(cfg, r, d2, beta)
    p_i = residual_power_array(cfg, r, d2)
    r_u = cfg.r_c - r
    model = config_power_model(cfg)
    lam = cfg.lambda_b_hat
    live = beta > 0
    scratch = None
    if np.any(live):
        mu_l, pi_l, ru_l = mu[live], p_i[live], r_u[live]
        if lower_bound:
            kappa = alzer_kappa(n)
            acc = np.ones(mu_l.size)
            for k in range(1, n + 1):
                arg = k * kappa * mu_l
                lap, _ = laplace_psi_arrays(model, lam, cfg.alpha, ru_l, arg, n - 1)
                acc += (-1) ** k * math.comb(n, k) * np.exp(-arg * pi_l) * lap
            out[live] = _check_window(acc, "connection outage lower bound")
        else:
            lap, psi = laplace_psi_arrays(model, lam, cfg.alpha, ru_l, mu_l, n - 1)
            if np.any(psi < 0):
                raise AnalysisError("negative derivative term Psi_m")
            x = derivative_terms_matrix(psi, lap)
            out[live] = _check_window(_outage_from_terms(mu_l * pi_l, x), "connection outage")
            if return_scratch:
                scratch = Theorem1Scratch(
                    kappa=alzer_kappa(n), delta_exp=2.0 / cfg.alpha, psi=psi,
                    q_matrix=toeplitz_q(psi), x_terms=x, laplace=lap)
    out = out.reshape(shape)
    return (out, scratch) if return_scratch else out


def connection_outage(ctx: EstimationContext, cfg: SystemConfig, beta_bs: float) -> float:
    """Small-ball approximation of the connection outage at distance ``ctx.r``."""
    return float(connection_outage_array(cfg, ctx.r, beta_bs))


def connection_outage_lower_bound(ctx: EstimationContext, cfg: SystemConfig, beta_bs: float) -> float:
    return float(connection_outage_array(cfg, ctx.r, beta_bs, lower_bound=True))


def laplace_iout(mu: float, ctx: EstimationContext, cfg: SystemConfig) -> float:
    """Laplace transform of the interference from active BSs beyond ``ctx.r_u``."""
    if mu < 0:
        raise ValueError("mu must be non-negative")
    if mu == 0 or cfg.lambda_b_hat == 0:
        return 1.0
    lap, _ = laplace_psi_arrays(config_power_model(cfg), cfg.lambda_b_hat, cfg.alpha,
                                ctx.r_u, mu, cfg.n_t - 1)
    return float(lap)


def gamma_cdf_lower_bound(n: int, y):
    """Gamma(n, 1) CDF lower bound (1 - exp(-kappa y))^n, exact for n = 1."""
    return (-np.expm1(-alzer_kappa(n) * np.asarray(y, dtype=float))) ** n


def alzer_outage_bound(n: int, mu: float, p_i: float, laplace) -> float:
    """Lower bound of Pr[Gamma(n,1) <= mu (p_i + I)] given the Laplace transform
    ``laplace(s)`` of ``I``.

    Binomial expansion of the Gamma CDF bound; ``n = 1`` reproduces the exact
    exponential-channel outage ``1 - exp(-mu p_i) L(mu)``.
    """
    kappa = alzer_kappa(n)
    total = 1.0
    for k in range(1, n + 1):
        s = k * kappa * mu
        total += (-1) ** k * math.comb(n, k) * math.exp(-s * p_i) * laplace(s)
    return total
