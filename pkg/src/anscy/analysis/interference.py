"""Out-of-cell interference: per-interferer power law, Laplace transform and its
normalised derivatives.

An interfering BS radiates its data beam with power ``a = P_S`` and AN spread
evenly over ``N_t - 1`` null-space dimensions with power ``b = P_A/(N_t-1)``
each, so the power reaching an arbitrary receiver is ``a X + b Y`` with
``X ~ Exp(1)`` and ``Y ~ Gamma(N_t - 1, 1)``. When ``a == b`` that is simply
``Gamma(N_t, a)``; otherwise the closed forms carry a ``(1 - b/a)^(1 - N_t)``
prefactor whose cancellations are handled in extended precision.

All kernels work on flat arrays of (ball radius, Laplace argument) pairs and
return dimensionless brackets scaled by ``pi * lam * r_u**2``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import mpmath
import numpy as np

from ..core import SystemConfig
from ..specfun import gamma_lower_array, hyp2f1_array

EQUAL_RTOL = 1e-9
GUARD_RTOL = 1e-4
# tolerated loss factor in the general branch before switching to mpmath
MAX_AMPLIFICATION = 1e4


class ReducedAccuracyWarning(UserWarning):
    """The near-equal power guard band replaced the general branch by the Gamma one."""


@dataclass(frozen=True)
class PowerModel:
    """Distribution of the power an interfering BS delivers (before pathloss)."""

    a: float
    b: float
    n_t: int
    branch: str  # "gamma" or "general"
    shape: int = 0
    scale: float = 0.0
    reduced_accuracy: bool = False

    @property
    def eta(self) -> float:
        return (self.a - self.b) / self.a

    @property
    def mean(self) -> float:
        return self.a + (self.n_t - 1) * self.b


def power_model(p_s: float, p_a: float, n_t: int, warn: bool = True) -> PowerModel:
    if not p_s > 0:
        raise ValueError("signal power must be positive")
    if p_a < 0:
        raise ValueError("AN power must be non-negative")
    b = p_a / (n_t - 1)
    if b == 0:
        # no AN: the power is exponential
        return PowerModel(p_s, 0.0, n_t, "gamma", 1, p_s)
    gap = abs(p_s - b) / p_s
    if gap <= EQUAL_RTOL:
        return PowerModel(p_s, b, n_t, "gamma", n_t, p_s)
    if gap < GUARD_RTOL:
        if warn:
            warnings.warn(
                f"P_S and P_A/(N_t-1) differ by a relative {gap:.2e}; using the "
                "equal-power form with mean-matched scale", ReducedAccuracyWarning, stacklevel=3)
        scale = (p_s + (n_t - 1) * b) / n_t
        return PowerModel(p_s, b, n_t, "gamma", n_t, scale, reduced_accuracy=True)
    return PowerModel(p_s, b, n_t, "general")


def config_power_model(cfg: SystemConfig, warn: bool = True) -> PowerModel:
    return power_model(cfg.p_s, cfg.p_a, cfg.n_t, warn)


def interferer_power_pdf(x, p_s: float, p_a: float, n_t: int):
    """Density of the interferer power ``P_S X + P_A/(N_t-1) Y`` at ``x``."""
    xs = np.asarray(x, dtype=float)
    if np.any(xs < 0):
        raise ValueError("x must be non-negative")
    if not p_s > 0 or p_a < 0:
        raise ValueError("need p_s > 0 and p_a >= 0")
    a = float(p_s)
    b = p_a / (n_t - 1)
    if b == 0:
        out = np.exp(-xs / a) / a
    elif abs(a - b) <= EQUAL_RTOL * a:
        k = n_t
        with np.errstate(divide="ignore"):
            logf = (k - 1) * np.log(xs) - xs / a - k * math.log(a) - math.lgamma(k)
        out = np.exp(logf)
    else:
        # exp(-x/a) gamma(N-1, x (1/b - 1/a)) / (a (1-b/a)^(N-1) Gamma(N-1))
        n = n_t - 1
        rate = 1.0 / b - 1.0 / a
        eta = (a - b) / a
        u = xs * rate
        out = np.empty_like(xs)
        near = np.abs(u) < n + 2.0
        out[near] = (np.exp(-xs[near] / a) * gamma_lower_array(n, u[near])
                     / (a * eta ** n * math.gamma(n)))
        far = ~near
        if np.any(far):
            # closed form of the integer-order incomplete gamma, with the two
            # exponentials combined so nothing overflows
            uf = u[far]
            poly = np.zeros_like(uf)
            term = np.ones_like(uf)
            for j in range(n):
                if j:
                    term = term * uf / j
                poly += term
            out[far] = (np.exp(-xs[far] / a) - np.exp(-xs[far] / b) * poly) / (a * eta ** n)
    return float(out) if out.ndim == 0 else out


def _gamma_branch(shape, scale, alpha, r_u, mu, n_psi):
    """Bracket of log L and of each Psi_m for Gamma(shape, scale) interferer powers."""
    d = 2.0 / alpha
    cz = scale * mu * r_u ** (-alpha)
    f0 = hyp2f1_array(shape + 1, 1 - d, 2 - d, -cz)
    log_bracket = -np.expm1(-shape * np.log1p(cz)) - shape * cz / (1 - d) * f0
    psi = np.empty((cz.size, n_psi))
    for m in range(1, n_psi + 1):
        fm = hyp2f1_array(m + shape, m - d, m - d + 1, -cz)
        psi[:, m - 1] = math.comb(shape + m - 1, shape - 1) * cz ** m * fm / (alpha * (m - d))
    # psi bracket is scaled by 2*pi*lam*r_u^2
    return log_bracket, psi


def _general_branch(model: PowerModel, alpha, r_u, mu, n_psi, dps=None):
    """General-branch brackets; with ``dps`` everything runs in mpmath."""
    n = model.n_t
    if dps is None:
        conv = lambda v: np.asarray(v, dtype=float)  # noqa: E731
        gamma = math.gamma
        one = 1.0
        a, b = model.a, model.b
    else:
        conv = lambda v: np.vectorize(mpmath.mpf, otypes=[object])(np.asarray(v, dtype=float))  # noqa: E731
        gamma = mpmath.gamma
        one = mpmath.mpf(1)
        a, b = mpmath.mpf(model.a), mpmath.mpf(model.b)
    d = 2 * one / alpha if dps is not None else 2.0 / alpha
    r_u, mu = conv(r_u), conv(mu)
    ratio = b / a
    eta = (a - b) / a
    z = r_u ** (-alpha) if dps is None else np.array([v ** (-alpha) for v in r_u], dtype=object)
    ca = a * mu * z
    cb = b * mu * z
    lead = eta ** (1 - n)

    def f(p, q, r, arg, comp=None):
        return hyp2f1_array(p, q, r, arg, precision=dps, one_minus_z=comp)

    # stable-law part: mean of P^d times Gamma(1-d)
    f_mom = f(1, n + d, n, np.array([eta], dtype=object if dps else float),
              np.array([ratio], dtype=object if dps else float))[0]
    pow_d = cb ** d if dps is None else np.array([v ** d for v in cb], dtype=object)
    stable = pow_d * ratio * gamma(n + d) / gamma(n) * gamma(1 - d) * f_mom
    inner = f(1, 1 + d, 2 + d, -1 / ca) / (ca * (1 + d))
    acc = 0
    for i in range(n - 1):
        acc = acc + eta ** i * f(i + 1, i + 1 + d, i + 2 + d, -1 / cb) / (cb ** (i + 1) * (i + 1 + d))
    t_part = 1 - (2 * lead / alpha) * (inner - ratio * acc)
    log_bracket = t_part - stable

    psi = np.empty((len(r_u), n_psi), dtype=object if dps else float)
    for m in range(1, n_psi + 1):
        first = ca ** m * f(m + 1, m - d, m - d + 1, -ca)
        acc = 0
        for i in range(n - 1):
            acc = acc + math.comb(i + m, i) * eta ** i * f(i + m + 1, m - d, m - d + 1, -cb)
        psi[:, m - 1] = lead * (first - ratio * cb ** m * acc) / (alpha * (m - d))
    return (np.asarray(log_bracket, dtype=float), np.asarray(psi, dtype=float))


def _amplification(model: PowerModel, ca):
    base = abs(model.eta) ** (1 - model.n_t)
    return base * np.maximum(1.0, 1.0 / ca)


def laplace_psi_arrays(model: PowerModel, lam: float, alpha: float, r_u, mu, n_psi: int):
    """Laplace transform L(mu) of the interference beyond ``r_u`` together with
    the scaled log-derivatives ``Psi_m = (-mu)^m / m! * d^m log L / dmu^m`` for
    ``m = 1..n_psi``. Arrays ``r_u`` and ``mu`` broadcast together.
    """
    r_u, mu = np.broadcast_arrays(np.asarray(r_u, dtype=float), np.asarray(mu, dtype=float))
    shape = r_u.shape
    r_u, mu = r_u.ravel(), mu.ravel()
    lap = np.ones(r_u.size)
    psi = np.zeros((r_u.size, n_psi))
    if np.any(mu < 0) or np.any(~np.isfinite(mu)):
        raise ValueError("Laplace argument must be finite and non-negative")
    live = (mu > 0) & (lam > 0)
    if np.any(live):
        ru, m_ = r_u[live], mu[live]
        if model.branch == "gamma":
            logb, ps = _gamma_branch(model.shape, model.scale, alpha, ru, m_, n_psi)
        else:
            ca = model.a * m_ * ru ** (-alpha)
            amp = _amplification(model, ca)
            logb = np.empty(ru.size)
            ps = np.empty((ru.size, n_psi))
            hi = amp > MAX_AMPLIFICATION
            if np.any(~hi):
                logb[~hi], ps[~hi] = _general_branch(model, alpha, ru[~hi], m_[~hi], n_psi)
            if np.any(hi):
                dps = int(math.ceil(17 + math.log10(float(np.max(amp[hi]))) + 6))
                with mpmath.workdps(dps):
                    logb[hi], ps[hi] = _general_branch(model, alpha, ru[hi], m_[hi], n_psi, dps)
        area = math.pi * lam * ru ** 2
        lap[live] = np.exp(area * logb)
        psi[live] = 2.0 * area[:, None] * ps
    if not np.all(np.isfinite(lap)) or not np.all(np.isfinite(psi)):
        raise FloatingPointError(
            f"Laplace transform evaluation failed (branch={model.branch}, alpha={alpha})")
    return lap.reshape(shape), psi.reshape(shape + (n_psi,))


def mgf_complement(s, model: PowerModel):
    """1 - E[exp(-s P)] for the interferer power, evaluated without cancellation."""
    s = np.asarray(s, dtype=float)
    log_m = -np.log1p(model.a * s) - (model.n_t - 1) * np.log1p(model.b * s)
    return -np.expm1(log_m)
