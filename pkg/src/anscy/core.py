"""System configuration, unit conventions and shared derived scalars.

All computation happens in linear units (mW, metres, per square metre);
dBm only appears at the configuration boundary.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, fields, replace
from enum import Enum
from functools import cached_property


class CampbellMode(str, Enum):
    """How the pilot-contamination mean sum over out-of-cell users is computed.

    ``PAPER_LITERAL`` integrates ``y**-alpha`` along the radius only, giving
    ``lambda * Rc**(1 - alpha) / (alpha - 1)``; ``PLANAR_2D`` keeps the planar
    ``2*pi*y`` Jacobian, giving ``2*pi*lambda * Rc**(2 - alpha) / (alpha - 2)``.
    """

    PAPER_LITERAL = "PaperLiteral"
    PLANAR_2D = "Planar2D"


class ConfigError(ValueError):
    """Invalid configuration value."""


class DegenerateConfigWarning(UserWarning):
    """phi at 0 or 1 switches off either the data signal or the AN."""


def dbm_to_linear(x_dbm: float) -> float:
    """Convert dBm to mW."""
    if not math.isfinite(x_dbm):
        raise ValueError(f"power must be finite, got {x_dbm!r}")
    return 10.0 ** (x_dbm / 10.0)


def linear_to_dbm(x_mw: float) -> float:
    if not x_mw > 0:
        raise ValueError("power must be positive")
    return 10.0 * math.log10(x_mw)


def db_to_linear(x_db):
    return 10.0 ** (x_db / 10.0)


def thinned_bs_intensity(lambda_b: float, lambda_u: float) -> float:
    """Intensity of active (non-empty Voronoi cell) BSs under independent thinning."""
    if not lambda_b > 0:
        raise ValueError("lambda_b must be positive")
    if lambda_u < 0:
        raise ValueError("lambda_u must be non-negative")
    return -math.expm1(-lambda_u / lambda_b) * lambda_b


@dataclass(frozen=True)
class WynerRates:
    r_ts: float
    r_e: float
    r_s: float
    beta_bs: float
    beta_e: float


def wyner_from_thresholds(beta_bs: float, beta_e: float) -> WynerRates:
    """Codeword/redundancy/secrecy rates (bits/s/Hz) from SINR and SIR thresholds."""
    if beta_bs < 0 or beta_e < 0:
        raise ValueError("thresholds must be non-negative")
    r_ts = math.log2(1.0 + beta_bs)
    r_e = math.log2(1.0 + beta_e)
    return WynerRates(r_ts=r_ts, r_e=r_e, r_s=r_ts - r_e, beta_bs=beta_bs, beta_e=beta_e)


@dataclass(frozen=True)
class OutageConstraints:
    sigma: float = 0.1
    epsilon: float = 0.01

    def __post_init__(self):
        for name in ("sigma", "epsilon"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ConfigError(f"{name} must lie strictly inside (0, 1), got {v}")


@dataclass(frozen=True)
class SystemConfig:
    """Physical and network parameters of the hybrid cellular deployment.

    Intensities are per square metre, radii in metres, powers in dBm.
    ``r_sim`` and ``r_sim_e`` override the Monte Carlo windows (BS annulus
    outer radius and eavesdropper disk radius); ``None`` selects defaults.
    """

    n_t: int = 4
    alpha: float = 3.0
    p_tot_dbm: float = 30.0
    phi: float = 0.5
    lambda_b: float = 1e-4
    lambda_u: float = 1e-3
    lambda_e: float = 0.0
    r_c: float = 200.0
    n0_dbm: float = -50.0
    p_tau_dbm: float = 20.0
    tau: int = 4
    sigma_e2: float = 0.0
    campbell_mode: CampbellMode = CampbellMode.PAPER_LITERAL
    r_sim: float | None = None
    r_sim_e: float | None = None

    def __post_init__(self):
        if isinstance(self.campbell_mode, str) and not isinstance(self.campbell_mode, CampbellMode):
            object.__setattr__(self, "campbell_mode", CampbellMode(self.campbell_mode))
        if int(self.n_t) != self.n_t or self.n_t < 2:
            raise ConfigError(f"n_t must be an integer >= 2, got {self.n_t}")
        if int(self.tau) != self.tau or self.tau < 1:
            raise ConfigError(f"tau must be an integer >= 1, got {self.tau}")
        object.__setattr__(self, "n_t", int(self.n_t))
        object.__setattr__(self, "tau", int(self.tau))
        if not self.alpha > 2:
            raise ConfigError("alpha must exceed 2")
        if not 0.0 <= self.phi <= 1.0:
            raise ConfigError("phi must lie in [0, 1]")
        if not self.lambda_b > 0:
            raise ConfigError("lambda_b must be positive")
        for name in ("lambda_u", "lambda_e", "sigma_e2"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be non-negative")
        if not self.r_c > 0:
            raise ConfigError("r_c must be positive")
        for name in ("p_tot_dbm", "n0_dbm", "p_tau_dbm"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite")
        if self.r_sim is not None and not self.r_sim > self.r_c:
            raise ConfigError("r_sim must exceed r_c")
        if self.r_sim_e is not None and not self.r_sim_e > 0:
            raise ConfigError("r_sim_e must be positive")
        if self.phi in (0.0, 1.0):
            warnings.warn(
                f"phi={self.phi} disables {'the AN' if self.phi == 1.0 else 'the data signal'}",
                DegenerateConfigWarning, stacklevel=3)

    def with_(self, **changes) -> "SystemConfig":
        return replace(self, **changes)

    @classmethod
    def field_names(cls):
        return [f.name for f in fields(cls)]

    @cached_property
    def p_tot(self) -> float:
        return dbm_to_linear(self.p_tot_dbm)

    @property
    def p_s(self) -> float:
        return self.phi * self.p_tot

    @property
    def p_a(self) -> float:
        return (1.0 - self.phi) * self.p_tot

    @property
    def p_an_per_dim(self) -> float:
        """AN power per null-space dimension, P_A / (N_t - 1)."""
        return self.p_a / (self.n_t - 1)

    @property
    def n0(self) -> float:
        return dbm_to_linear(self.n0_dbm)

    @property
    def p_tau(self) -> float:
        return dbm_to_linear(self.p_tau_dbm)

    @cached_property
    def lambda_b_hat(self) -> float:
        return thinned_bs_intensity(self.lambda_b, self.lambda_u)

    def pilot_contamination_sum(self) -> float:
        """Mean of the pathloss sum over active out-of-cell users at the target BS."""
        lam, a, rc = self.lambda_b_hat, self.alpha, self.r_c
        if self.campbell_mode is CampbellMode.PLANAR_2D:
            return 2.0 * math.pi * lam * rc ** (2.0 - a) / (a - 2.0)
        return lam * rc ** (1.0 - a) / (a - 1.0)
