"""Upper and lower bounds on the secrecy outage probability.

An eavesdropper at distance ``y`` from the target BS decodes when its SIR,
limited only by AN, exceeds the threshold. Conditioned on ``y`` this happens
with probability ``(1 + a_e)^(1 - N_t) * T(y)`` where ``a_e`` is the AN-to-signal
threshold ratio and ``T(y)`` is the probability generating functional of the
active BSs outside the cell. ``T`` is written through the directional integral

    tail_integral(x) = int_x^inf (1 - (1 + c rho^-alpha)^(1 - N_t)) rho d rho,

with ``c = a_e y^alpha``, taken from the eavesdropper to the cell boundary along
every direction.
"""
from __future__ import annotations

import math

import numpy as np

from ..core import SystemConfig
from ..quadrature import QuadratureError, integrate_batch
from ..specfun import hyp2f1_array
from .estimation import AnalysisError

RTOL = 1e-8
ATOL = 1e-12
TAIL_REL = 1e-12


def an_ratio(cfg: SystemConfig, beta_e: float) -> float:
    """Threshold-scaled AN-per-dimension to signal power ratio."""
    return cfg.p_a * beta_e / ((cfg.n_t - 1) * cfg.p_s)


def full_plane_term(c, n_t: int, alpha: float):
    """tail_integral(0) for scale ``c``: 0.5 c^d Gamma(1-d) Gamma(N-1+d)/Gamma(N-1)."""
    d = 2.0 / alpha
    k = 0.5 * math.gamma(1 - d) * math.exp(math.lgamma(n_t - 1 + d) - math.lgamma(n_t - 1))
    return k * np.asarray(c, dtype=float) ** d


def tail_integral(x, c, n_t: int, alpha: float):
    """Closed form of the directional integral beyond distance ``x``.

    Written with ``w = x^a / (x^a + c)`` so that ``x = 0`` and ``x -> inf`` are
    both evaluated without overflow or cancellation in ``1 - w``.
    """
    x = np.asarray(x, dtype=float)
    c = np.asarray(c, dtype=float)
    x, c = np.broadcast_arrays(x, c)
    d = 2.0 / alpha
    xa = x ** alpha
    den = xa + c
    w = xa / den
    omw = c / den
    m = n_t - 1
    with np.errstate(divide="ignore"):
        one_minus_wm = -np.expm1(m * np.log1p(-omw)) if m else np.zeros_like(w)
    f = hyp2f1_array(1, n_t, n_t + d, w.ravel(), one_minus_z=omw.ravel()).reshape(w.shape)
    x2 = x * x
    out = (-0.5 * x2 * one_minus_wm + full_plane_term(c, n_t, alpha)
           - m / (2.0 * (m + d)) * x2 * omw * w ** m * f)
    return out


def _theta_exponent(y, r_c, c, n_t, alpha):
    """Angular integral of tail_integral over all directions from each ``y``.

    Inside the cell the boundary is at l1 (and l2 in the opposite direction);
    outside, rays with theta < nu cross the cell between l3 and l4 and the rest
    see the full plane.
    """
    y = np.asarray(y, dtype=float)
    c = np.asarray(c, dtype=float)
    inside = y <= r_c
    hi = np.where(inside, math.pi, np.arcsin(np.minimum(r_c / np.maximum(y, 1e-300), 1.0)))

    def integrand(theta, owner):
        yy, cc = y[owner], c[owner]
        s = yy * np.sin(theta)
        root = np.sqrt(np.maximum(r_c * r_c - s * s, 0.0))
        ycos = yy * np.cos(theta)
        ins = inside[owner]
        out = np.empty_like(theta)
        if np.any(ins):
            k = ins
            out[k] = (tail_integral(root[k] + ycos[k], cc[k], n_t, alpha)
                      + tail_integral(np.maximum(root[k] - ycos[k], 0.0), cc[k], n_t, alpha))
        if np.any(~ins):
            k = ~ins
            l3 = np.maximum(ycos[k] - root[k], 0.0)
            l4 = ycos[k] + root[k]
            out[k] = (full_plane_term(cc[k], n_t, alpha)
                      - tail_integral(l3, cc[k], n_t, alpha)
                      + tail_integral(l4, cc[k], n_t, alpha))
        return out

    val, _ = integrate_batch(integrand, np.zeros_like(y), hi, rtol=RTOL, atol=ATOL,
                             label="angular integral")
    outside = ~inside
    val[outside] = 2.0 * (val[outside] + (math.pi - hi[outside]) * full_plane_term(c[outside], n_t, alpha))
    return val


def _interferer_intensity(cfg, an_intensity):
    return cfg.lambda_b_hat if an_intensity is None else float(an_intensity)


def _check(cfg, beta_e):
    if not beta_e > 0:
        raise ValueError("beta_e must be positive")
    if cfg.p_s == 0:
        raise ValueError("secrecy outage needs a positive signal power")


def pgfl_factor(cfg: SystemConfig, beta_e: float, y, an_intensity=None):
    """T(y): probability that no outside BS's AN pushes the eavesdropper below threshold."""
    ae = an_ratio(cfg, beta_e)
    lam = _interferer_intensity(cfg, an_intensity)
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if lam == 0 or ae == 0:
        return np.ones_like(y)
    c = ae * y ** cfg.alpha
    return np.exp(-lam * _theta_exponent(y, cfg.r_c, c, cfg.n_t, cfg.alpha))


def _radial_integral(cfg, beta_e, lam, weight, lo, hi, what):
    ae = an_ratio(cfg, beta_e)

    def f(y, _owner):
        c = ae * y ** cfg.alpha
        return weight(y) * np.exp(-lam * _theta_exponent(y, cfg.r_c, c, cfg.n_t, cfg.alpha))

    try:
        val, err = integrate_batch(f, lo, hi, rtol=RTOL, atol=0.0, label=what)
    except QuadratureError as exc:
        raise AnalysisError(f"{what}: {exc}") from exc
    return val, err


def secrecy_outage_upper(cfg: SystemConfig, beta_e: float, an_intensity=None) -> float:
    """Upper bound: every eavesdropper is counted as an independent threat."""
    _check(cfg, beta_e)
    if cfg.lambda_e == 0:
        return 0.0
    lam = _interferer_intensity(cfg, an_intensity)
    ae = an_ratio(cfg, beta_e)
    n, alpha = cfg.n_t, cfg.alpha
    if lam == 0 or ae == 0:
        # no outside AN: the reachable region is the whole plane
        return 1.0
    pref = (1.0 + ae) ** (1 - n)
    (inner,), _ = _radial_integral(cfg, beta_e, lam, lambda y: y, [0.0], [cfg.r_c], "inside-cell radial integral")
    # beyond r_c the angular exponent is at least pi * full_plane_term, giving a
    # Gaussian envelope exp(-k y^2) with the tail bound exp(-k Y^2) / (2k)
    k = lam * math.pi * float(full_plane_term(ae, n, alpha))
    target = TAIL_REL * max(inner, 1e-300)
    y_max = max(2.0 * cfg.r_c, math.sqrt(max(math.log(1.0 / (2.0 * k * target)), 0.0) / k))
    (outer,), _ = _radial_integral(cfg, beta_e, lam, lambda y: y, [cfg.r_c], [y_max], "outside-cell radial integral")
    tail = math.exp(-k * y_max ** 2) / (2.0 * k)
    if tail > 1e-8 * (inner + outer):
        raise AnalysisError("radial truncation error above tolerance")
    total = inner + outer
    p = -math.expm1(-2.0 * math.pi * cfg.lambda_e * pref * total)
    return _window(p)


def secrecy_outage_lower(cfg: SystemConfig, beta_e: float, an_intensity=None) -> float:
    """Lower bound from the nearest eavesdropper alone."""
    _check(cfg, beta_e)
    lam_e = cfg.lambda_e
    if lam_e == 0:
        return 0.0
    lam = _interferer_intensity(cfg, an_intensity)
    ae = an_ratio(cfg, beta_e)
    pref = (1.0 + ae) ** (1 - cfg.n_t)
    y_max = math.sqrt(math.log(1e12) / (math.pi * lam_e))
    if lam == 0 or ae == 0:
        return _window(pref * -math.expm1(-math.pi * lam_e * y_max ** 2))

    def density(y):
        return 2.0 * math.pi * lam_e * y * np.exp(-math.pi * lam_e * y * y)

    lo, hi = [0.0], [min(cfg.r_c, y_max)]
    if y_max > cfg.r_c:
        lo.append(cfg.r_c)
        hi.append(y_max)
    val, _ = _radial_integral(cfg, beta_e, lam, density, lo, hi, "nearest-eavesdropper integral")
    return _window(pref * float(np.sum(val)))


def _window(p):
    if not (-1e-9 <= p <= 1 + 1e-9) or not math.isfinite(p):
        raise AnalysisError(f"secrecy outage bound {p} outside [0, 1]")
    return min(max(p, 0.0), 1.0)
