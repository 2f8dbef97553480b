"""Cell-averaged outage, threshold solving and secrecy throughput."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .analysis.connection import connection_outage_array
from .analysis.secrecy import secrecy_outage_upper
from .core import OutageConstraints, SystemConfig

GL_NODES = 64
EPS_R_FRAC = 1e-3
TOL_REL = 1e-4
EXPAND = 4.0
BRACKET = (1e-6, 1e6)
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class Direction(str, enum.Enum):
    INCREASING = "increasing"  # want the largest x with f(x) <= target
    DECREASING = "decreasing"  # want the smallest x with f(x) <= target


class ThresholdStatus(str, enum.Enum):
    INTERIOR = "interior"
    SATURATED = "saturated"  # constraint holds over the whole search range
    INFEASIBLE = "infeasible"  # constraint holds nowhere in the search range


@dataclass(frozen=True)
class ThresholdResult:
    beta: float
    status: ThresholdStatus
    value: float
    evaluations: int

    @property
    def feasible(self) -> bool:
        return self.status is not ThresholdStatus.INFEASIBLE


@dataclass(frozen=True)
class ThroughputSolution:
    beta_bs_star: float
    beta_e_star: float
    mu: float
    p_us: float
    feasible: bool
    co_status: ThresholdStatus = ThresholdStatus.INTERIOR
    so_status: ThresholdStatus = ThresholdStatus.INTERIOR


def scheduling_probability(r_c: float, lambda_u: float) -> float:
    """Probability that a given user in the cell is the one scheduled."""
    if not r_c > 0 or lambda_u < 0:
        raise ValueError("need r_c > 0 and lambda_u >= 0")
    x = math.pi * r_c * r_c * lambda_u
    if x == 0:
        return 1.0
    return -math.expm1(-x) / x


def radial_nodes(r_c: float, eps_frac: float = EPS_R_FRAC, n: int = GL_NODES):
    """Nodes and weights for averaging over the uniform-in-disk user distance.

    Gauss-Legendre on [eps, r_c - eps]; the radial mass below eps and above
    r_c - eps is attached to the two end nodes, which are appended last.
    """
    eps = eps_frac * r_c
    lo, hi = eps, r_c - eps
    t, w = np.polynomial.legendre.leggauss(n)
    r = 0.5 * (hi - lo) * t + 0.5 * (hi + lo)
    wt = 0.5 * (hi - lo) * w * 2.0 * r / r_c ** 2
    low_mass = (eps / r_c) ** 2
    high_mass = 1.0 - (hi / r_c) ** 2
    return np.concatenate([r, [lo, hi]]), np.concatenate([wt, [low_mass, high_mass]])


def avg_connection_outage(cfg: SystemConfig, beta_bs, eps_frac: float = EPS_R_FRAC,
                          n_nodes: int = GL_NODES):
    """Connection outage averaged over a user placed uniformly in the cell."""
    beta = np.asarray(beta_bs, dtype=float)
    r, w = radial_nodes(cfg.r_c, eps_frac, n_nodes)
    p = connection_outage_array(cfg, r[:, None], beta.reshape(1, -1))
    out = np.clip(w @ p, 0.0, 1.0)
    return float(out[0]) if beta.ndim == 0 else out.reshape(beta.shape)


def solve_threshold(target: float, f, direction: Direction, tol_rel: float = TOL_REL,
                    start: float = 1.0, bracket=BRACKET, factor: float = EXPAND) -> ThresholdResult:
    """Boundary of the set {x : f(x) <= target} for a monotone ``f``.

    The bracket is found by expanding geometrically from ``start`` within
    ``bracket``, then refined by bisection in log scale; the returned point is
    always on the feasible side.
    """
    lo_lim, hi_lim = bracket
    x = min(max(start, lo_lim), hi_lim)
    calls = 0

    def ok(v):
        nonlocal calls
        calls += 1
        return f(v) <= target

    inc = Direction(direction) is Direction.INCREASING
    good, bad = None, None
    fx = ok(x)
    if fx:
        good = x
    else:
        bad = x
    # expand towards the side that is missing
    while good is None or bad is None:
        if good is None:
            step = x / factor if inc else x * factor
        else:
            step = x * factor if inc else x / factor
        if step < lo_lim or step > hi_lim:
            edge = lo_lim if step < lo_lim else hi_lim
            if edge != x:
                step = edge
            else:
                if good is None:
                    return ThresholdResult(edge, ThresholdStatus.INFEASIBLE, f(edge), calls + 1)
                return ThresholdResult(edge, ThresholdStatus.SATURATED, f(edge), calls + 1)
        x = step
        if ok(x):
            good = x
        else:
            bad = x
    while abs(math.log(good / bad)) > math.log1p(tol_rel):
        mid = math.sqrt(good * bad)
        if ok(mid):
            good = mid
        else:
            bad = mid
    return ThresholdResult(good, ThresholdStatus.INTERIOR, f(good), calls + 1)


def solve_connection_threshold(cfg: SystemConfig, sigma: float, tol_rel: float = TOL_REL,
                               eps_frac: float = EPS_R_FRAC) -> ThresholdResult:
    """Largest SINR threshold with cell-averaged connection outage <= sigma."""
    return solve_threshold(sigma, lambda b: avg_connection_outage(cfg, b, eps_frac),
                           Direction.INCREASING, tol_rel)


def _secrecy_key(cfg):
    return replace(cfg, p_tau_dbm=0.0, tau=1, n0_dbm=0.0, campbell_mode=cfg.campbell_mode)


@lru_cache(maxsize=256)
def _secrecy_threshold_cached(cfg: SystemConfig, epsilon: float, tol_rel: float) -> ThresholdResult:
    return solve_threshold(epsilon, lambda b: secrecy_outage_upper(cfg, b),
                           Direction.DECREASING, tol_rel)


def solve_secrecy_threshold(cfg: SystemConfig, epsilon: float, tol_rel: float = TOL_REL) -> ThresholdResult:
    """Smallest SIR threshold with the secrecy outage upper bound <= epsilon."""
    if cfg.lambda_e == 0:
        return ThresholdResult(0.0, ThresholdStatus.SATURATED, 0.0, 0)
    # the secrecy bound ignores pilot and noise parameters, so cache without them
    return _secrecy_threshold_cached(_secrecy_key(cfg), float(epsilon), float(tol_rel))


def secrecy_throughput(cfg: SystemConfig, constraints: OutageConstraints,
                       tol_rel: float = TOL_REL, eps_frac: float = EPS_R_FRAC,
                       r: float | None = None) -> ThroughputSolution:
    """Secrecy throughput of a scheduled user.

    By default the reliability constraint applies to the connection outage
    averaged over the cell; with ``r`` it applies at that fixed user distance.
    """
    p_us = scheduling_probability(cfg.r_c, cfg.lambda_u)
    if cfg.p_s == 0:
        return ThroughputSolution(0.0, math.inf, 0.0, p_us, False,
                                  ThresholdStatus.INFEASIBLE, ThresholdStatus.INFEASIBLE)
    if r is None:
        co = solve_connection_threshold(cfg, constraints.sigma, tol_rel, eps_frac)
    else:
        co = solve_threshold(constraints.sigma, lambda b: float(connection_outage_array(cfg, r, b)),
                             Direction.INCREASING, tol_rel)
    so = solve_secrecy_threshold(cfg, constraints.epsilon, tol_rel)
    beta_b = co.beta if co.feasible else 0.0
    beta_e = so.beta if so.feasible else math.inf
    rate = math.log2(1.0 + beta_b) - math.log2(1.0 + beta_e) if so.feasible else -math.inf
    feasible = co.feasible and so.feasible and rate > 0
    mu = p_us * (1.0 - constraints.sigma) * rate if feasible else 0.0
    return ThroughputSolution(beta_b, beta_e, mu, p_us, feasible, co.status, so.status)


@dataclass(frozen=True)
class PhiOptimum:
    phi_star: float
    mu_star: float
    solution: ThroughputSolution
    grid: tuple
    grid_mu: tuple


def optimize_phi(cfg: SystemConfig, constraints: OutageConstraints, grid_n: int = 19,
                 phi_range=(0.05, 0.95), xtol: float = 1e-3) -> PhiOptimum:
    """Grid scan over the power split, then golden-section refinement around the best cell."""
    if grid_n < 3:
        raise ValueError("grid_n must be >= 3")
    grid = np.linspace(phi_range[0], phi_range[1], grid_n)
    cache = {}

    def mu_of(phi):
        phi = float(phi)
        if phi not in cache:
            cache[phi] = secrecy_throughput(cfg.with_(phi=phi), constraints)
        return cache[phi].mu

    vals = np.array([mu_of(p) for p in grid])
    k = int(np.argmax(vals))
    if vals[k] <= 0:
        best = float(grid[k])
        return PhiOptimum(best, 0.0, cache[best], tuple(grid), tuple(vals))
    a = grid[max(k - 1, 0)]
    b = grid[min(k + 1, grid_n - 1)]
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    while b - a > xtol:
        if mu_of(c) >= mu_of(d):
            b, d = d, c
            c = b - GOLDEN * (b - a)
        else:
            a, c = c, d
            d = a + GOLDEN * (b - a)
    candidates = [float(grid[k]), float(c), float(d)]
    best = max(candidates, key=mu_of)
    return PhiOptimum(best, mu_of(best), cache[best], tuple(grid), tuple(vals))
