"""Monte Carlo simulator of the hybrid cellular network.

Trials run in fixed-size blocks. Every random quantity of a block comes from
its own stream keyed by ``(seed, block, kind, shell...)``, so results do not
depend on the number of workers, and enlarging a simulation window only adds
shells without disturbing the draws of the existing ones.

Interferers beyond the outermost window edge are represented by the mean of
their aggregate power (a deterministic term), which removes the bias a hard
truncation would introduce.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial

import numpy as np
from scipy import integrate

from .analysis.estimation import delta2_array, residual_power_array
from .analysis.interference import config_power_model, mgf_complement
from .analysis.secrecy import an_ratio, full_plane_term, pgfl_factor
from .core import SystemConfig
from .geometry import Annulus, Disk, radial_cdf_sample_cu, sample_ppp_batch, truncated_pathloss_mean

BLOCK_SIZE = 1024
DEFAULT_TRIALS = 100_000
# bound on the chance that an eavesdropper outside the simulated disk beats the threshold
EAV_TAIL = 1e-5
EAV_MAX_FACTOR = 16.0
Z95 = 1.96

_USER, _EAV, _BS, _PAIR = 0, 1, 2, 3


@dataclass(frozen=True)
class MonteCarloEstimate:
    p_hat: float
    trials: int
    ci_half_width_95: float
    seed: int
    hits: int = 0

    @classmethod
    def from_counts(cls, hits: int, trials: int, seed: int) -> "MonteCarloEstimate":
        p = hits / trials
        return cls(p, trials, Z95 * math.sqrt(p * (1.0 - p) / trials), seed, int(hits))


@dataclass(frozen=True)
class LaplaceEstimate:
    value: float
    std_error: float
    trials: int
    seed: int


def block_rng(seed: int, block: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(block,) + key)))


def shell_edges(inner: float, base: float, outer: float):
    """Boundaries inner, base, 2*base, 4*base, ... ending exactly at ``outer``."""
    edges = [inner]
    e = base
    while e < outer * (1 - 1e-12):
        if e > inner:
            edges.append(e)
        e *= 2.0
    edges.append(outer)
    return edges


def default_eav_radius(lambda_e: float) -> float:
    """Radius holding all but a 1e-6 fraction of the nearest-eavesdropper law."""
    return math.sqrt(math.log(1e6) / (math.pi * lambda_e))


def eav_tail_radius(cfg: SystemConfig, beta_e: float, tol: float = EAV_TAIL) -> float:
    """Smallest radius R (at least the nearest-eavesdropper radius) with

    Pr[some eavesdropper beyond R has SIR > beta_e] <= tol.

    The probability is bounded by the expected number of such eavesdroppers,
    2 pi lambda_e (1 + a_e)^(1 - N_t) int_R^inf y T(y) dy, tabulated on a grid.
    The radius is capped at ``EAV_MAX_FACTOR`` times the base radius.
    """
    base = default_eav_radius(cfg.lambda_e)
    ae = an_ratio(cfg, beta_e)
    lam = cfg.lambda_b_hat
    if ae == 0 or lam == 0:
        # no AN outside: every eavesdropper wins, the window only adds more of them
        return base
    cap = EAV_MAX_FACTOR * base
    k = lam * math.pi * float(full_plane_term(ae, cfg.n_t, cfg.alpha))
    y_end = min(cap, math.sqrt(base * base + 60.0 / k))
    y = np.linspace(base, y_end, 1201)
    g = 2.0 * math.pi * cfg.lambda_e * (1.0 + ae) ** (1 - cfg.n_t) * y * pgfl_factor(cfg, beta_e, y)
    # tail[i] = int_{y_i}^{y_end} g, plus the Gaussian-envelope bound beyond y_end
    seg = 0.5 * (g[1:] + g[:-1]) * np.diff(y)
    tail = np.append(np.cumsum(seg[::-1])[::-1], 0.0)
    tail += math.pi * cfg.lambda_e * math.exp(-k * y_end * y_end) / k
    ok = np.nonzero(tail <= tol)[0]
    return float(y[ok[0]]) if ok.size else cap


def bs_window(cfg: SystemConfig) -> float:
    return cfg.r_sim if cfg.r_sim is not None else 10.0 * cfg.r_c


def eav_window(cfg: SystemConfig, beta_min: float | None = None) -> float:
    """Eavesdropper disk radius; sized for the smallest simulated threshold when given."""
    if cfg.r_sim_e is not None:
        return cfg.r_sim_e
    if beta_min is None:
        return default_eav_radius(cfg.lambda_e)
    return eav_tail_radius(cfg, beta_min)


def secrecy_bs_window(cfg: SystemConfig, beta_min: float | None = None) -> float:
    if cfg.r_sim is not None:
        return cfg.r_sim
    return max(10.0 * cfg.r_c, 2.0 * eav_window(cfg, beta_min))


def worker_count(requested=None) -> int:
    cap = os.environ.get("ANSCY_THREADS")
    n = requested if requested is not None else (os.cpu_count() or 1)
    if cap:
        n = min(n, max(1, int(cap)))
    return max(1, n)


def _map_blocks(fn, n_blocks, workers):
    if workers <= 1 or n_blocks <= 1:
        return [fn(b) for b in range(n_blocks)]
    with ProcessPoolExecutor(max_workers=min(workers, n_blocks)) as ex:
        return list(ex.map(fn, range(n_blocks)))


def _block_sizes(trials):
    if trials < 1:
        raise ValueError("trials must be >= 1")
    full, rest = divmod(trials, BLOCK_SIZE)
    return [BLOCK_SIZE] * full + ([rest] if rest else [])


# -- channel gains ---------------------------------------------------------

def _complex_normal(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)


def random_bases(rng, count, n_t):
    """Unitary matrices whose first column is a beamformer and the rest span its
    null space, from QR of i.i.d. complex Gaussian matrices."""
    q, r = np.linalg.qr(_complex_normal(rng, (count, n_t, n_t)))
    # fix the column phases so the factorisation is unique
    ph = np.diagonal(r, axis1=1, axis2=2)
    ph = ph / np.where(np.abs(ph) > 0, np.abs(ph), 1.0)
    return q * ph[:, None, :]


def project_gains(rng, bases, idx):
    """|f^H w|^2 and ||f^H U||^2 for fresh channels f against ``bases[idx]``."""
    n_t = bases.shape[-1]
    f = _complex_normal(rng, (len(idx), n_t))
    proj = np.einsum("kn,knm->km", f.conj(), bases[idx])
    p2 = np.abs(proj) ** 2
    return p2[:, 0], p2[:, 1:].sum(axis=1)


def _scalar_gains(rng, count, n_t):
    gs = rng.exponential(size=count)
    ga = rng.gamma(n_t - 1, size=count)
    return gs, ga


# -- connection outage -----------------------------------------------------

def _sinr_block(cfg: SystemConfig, seed: int, r_fixed, small_ball: bool, vector: bool,
                block: int, n: int):
    """SINR of the typical target-cell user for ``n`` trials."""
    n_t, alpha = cfg.n_t, cfg.alpha
    urng = block_rng(seed, block, _USER)
    if r_fixed is None:
        r = radial_cdf_sample_cu(cfg.r_c, 1.0 - urng.random(n))
        r = np.atleast_1d(r)
    else:
        r = np.full(n, float(r_fixed))
    d2 = delta2_array(cfg, r)
    p_i = residual_power_array(cfg, r, d2)
    if vector:
        h = np.sum(np.abs(_complex_normal(urng, (n, n_t))) ** 2, axis=1) * d2
    else:
        h = d2 * urng.gamma(n_t, size=n)
    lam = cfg.lambda_b_hat
    a, b = cfg.p_s, cfg.p_an_per_dim
    outer = bs_window(cfg)
    interference = np.zeros(n)
    if small_ball:
        # interferers around the user beyond r_c - r; the user sits at the origin
        edges = shell_edges(cfg.r_c - float(r_fixed), 10.0 * cfg.r_c, outer)
        user = np.zeros((n, 2))
        offset = np.zeros(n)
    else:
        edges = shell_edges(cfg.r_c, 10.0 * cfg.r_c, outer)
        user = np.column_stack([r, np.zeros(n)])
        offset = r
    if lam > 0:
        for j in range(len(edges) - 1):
            rng = block_rng(seed, block, _BS, j)
            owner, pts = sample_ppp_batch(lam, Annulus(edges[j], edges[j + 1]), n, rng)
            if vector:
                gs, ga = project_gains(rng, random_bases(rng, len(owner), n_t), np.arange(len(owner)))
            else:
                gs, ga = _scalar_gains(rng, len(owner), n_t)
            dx, dy = pts[:, 0] - user[owner, 0], pts[:, 1] - user[owner, 1]
            loss = (dx * dx + dy * dy) ** (-0.5 * alpha)
            interference += np.bincount(owner, (a * gs + b * ga) * loss, minlength=n)
        interference += lam * cfg.p_tot * truncated_pathloss_mean(alpha, outer, offset)
    return cfg.p_s * h * r ** (-alpha) / (p_i + interference)


def _count_block(sinr_fn, betas, block_and_size):
    block, n = block_and_size
    sinr = sinr_fn(block, n)
    return (sinr[:, None] <= betas[None, :]).sum(axis=0)


def _outage_counts(cfg, seed, trials, betas, r_fixed, small_ball, vector, workers):
    sizes = _block_sizes(trials)
    sinr_fn = partial(_sinr_block, cfg, seed, r_fixed, small_ball, vector)
    fn = partial(_indexed, partial(_count_block, sinr_fn, betas), sizes)
    counts = _map_blocks(fn, len(sizes), worker_count(workers))
    return np.sum(counts, axis=0)


def _indexed(fn, sizes, block):
    return fn((block, sizes[block]))


def _as_betas(beta):
    arr = np.atleast_1d(np.asarray(beta, dtype=float))
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise ValueError("thresholds must be non-negative")
    return arr


def _wrap(counts, trials, seed, scalar):
    est = [MonteCarloEstimate.from_counts(int(c), trials, seed) for c in counts]
    return est[0] if scalar else est


def simulate_connection_outage(cfg: SystemConfig, r: float, beta_bs, trials: int = DEFAULT_TRIALS,
                               seed: int = 0, vector_channels: bool = False, workers=None):
    """Empirical Pr[SINR <= beta] for a user at distance ``r`` inside the true cell.

    ``beta_bs`` may be a sequence; all thresholds share the same SINR draws.
    """
    if not 0 < r < cfg.r_c:
        raise ValueError("need 0 < r < r_c")
    betas = _as_betas(beta_bs)
    counts = _outage_counts(cfg, seed, trials, betas, r, False, vector_channels, workers)
    return _wrap(counts, trials, seed, np.ndim(beta_bs) == 0)


def simulate_small_ball_outage(cfg: SystemConfig, r: float, beta_bs, trials: int = DEFAULT_TRIALS,
                               seed: int = 0, workers=None):
    """Outage with interferers only outside the ball of radius r_c - r around the user."""
    if not 0 < r < cfg.r_c:
        raise ValueError("need 0 < r < r_c")
    betas = _as_betas(beta_bs)
    counts = _outage_counts(cfg, seed, trials, betas, r, True, False, workers)
    return _wrap(counts, trials, seed, np.ndim(beta_bs) == 0)


def simulate_avg_connection_outage(cfg: SystemConfig, beta_bs, trials: int = DEFAULT_TRIALS,
                                   seed: int = 0, workers=None):
    """Outage of a user placed uniformly in the target cell (radius drawn per trial)."""
    betas = _as_betas(beta_bs)
    counts = _outage_counts(cfg, seed, trials, betas, None, False, False, workers)
    return _wrap(counts, trials, seed, np.ndim(beta_bs) == 0)


# -- Laplace transform of the small-ball interference ------------------------

def far_field_laplace(cfg: SystemConfig, mu: float, radius: float) -> float:
    """E[exp(-mu I)] for the interference of active BSs beyond ``radius``."""
    lam = cfg.lambda_b_hat
    if mu == 0 or lam == 0:
        return 1.0
    model = config_power_model(cfg, warn=False)
    val, _ = integrate.quad(lambda rho: float(mgf_complement(mu * rho ** (-cfg.alpha), model)) * rho,
                            radius, np.inf, epsabs=0.0, epsrel=1e-12, limit=200)
    return math.exp(-2.0 * math.pi * lam * val)


def _laplace_block(cfg, seed, r_u, mus, outer, sizes, block):
    n = sizes[block]
    lam = cfg.lambda_b_hat
    a, b = cfg.p_s, cfg.p_an_per_dim
    interference = np.zeros(n)
    if lam > 0:
        edges = shell_edges(r_u, 10.0 * cfg.r_c, outer)
        for j in range(len(edges) - 1):
            rng = block_rng(seed, block, _BS, j)
            owner, pts = sample_ppp_batch(lam, Annulus(edges[j], edges[j + 1]), n, rng)
            gs, ga = _scalar_gains(rng, len(owner), cfg.n_t)
            dist = np.hypot(pts[:, 0], pts[:, 1])
            interference += np.bincount(owner, (a * gs + b * ga) * dist ** (-cfg.alpha), minlength=n)
    vals = np.exp(-np.outer(interference, mus))
    return vals.sum(axis=0), (vals ** 2).sum(axis=0)


def simulate_laplace_iout(cfg: SystemConfig, ctx, mu, trials: int = DEFAULT_TRIALS, seed: int = 0,
                          workers=None):
    """Sample mean of exp(-mu I) for interferers outside the ball of radius ``ctx.r_u``.

    The window contribution is simulated; the part beyond the window enters
    through its exact Laplace factor.
    """
    mus = np.atleast_1d(np.asarray(mu, dtype=float))
    if np.any(mus < 0):
        raise ValueError("mu must be non-negative")
    sizes = _block_sizes(trials)
    outer = max(bs_window(cfg), 2.0 * ctx.r_u)
    fn = partial(_laplace_block, cfg, seed, ctx.r_u, mus, outer, sizes)
    parts = _map_blocks(fn, len(sizes), worker_count(workers))
    s1 = np.sum([p[0] for p in parts], axis=0)
    s2 = np.sum([p[1] for p in parts], axis=0)
    out = []
    for k, m in enumerate(mus):
        tail = far_field_laplace(cfg, float(m), outer)
        mean = s1[k] / trials
        var = max(s2[k] / trials - mean * mean, 0.0) * trials / max(trials - 1, 1)
        out.append(LaplaceEstimate(mean * tail, tail * math.sqrt(var / trials), trials, seed))
    return out[0] if np.ndim(mu) == 0 else out


# -- secrecy outage --------------------------------------------------------

def _pairs(owner_a, owner_b, n):
    """All (i, j) with owner_a[i] == owner_b[j], for owners grouped in order."""
    cb = np.bincount(owner_b, minlength=n)
    start_b = np.concatenate([[0], np.cumsum(cb)[:-1]])
    reps = cb[owner_a]
    ia = np.repeat(np.arange(len(owner_a)), reps)
    offs = np.arange(int(reps.sum())) - np.repeat(np.cumsum(reps) - reps, reps)
    ib = np.repeat(start_b[owner_a], reps) + offs
    return ia, ib


def _max_sir_block(cfg: SystemConfig, seed: int, vector: bool, sizes, block: int):
    """Largest eavesdropper SIR in each trial (0 when no eavesdropper exists)."""
    n = sizes[block]
    best = np.zeros(n)
    if cfg.lambda_e == 0:
        return best
    n_t, alpha = cfg.n_t, cfg.alpha
    a, b = cfg.p_s, cfg.p_an_per_dim
    lam = cfg.lambda_b_hat
    r_e = eav_window(cfg)
    r_b = secrecy_bs_window(cfg)
    if r_b <= r_e:
        raise ValueError("BS window must exceed the eavesdropper window")
    urng = block_rng(seed, block, _USER)
    serving = random_bases(urng, n, n_t) if vector else None

    e_edges = shell_edges(0.0, default_eav_radius(cfg.lambda_e), r_e)
    eav = []
    for i in range(len(e_edges) - 1):
        rng = block_rng(seed, block, _EAV, i)
        win = Disk(e_edges[1]) if i == 0 else Annulus(e_edges[i], e_edges[i + 1])
        owner, pts = sample_ppp_batch(cfg.lambda_e, win, n, rng)
        if vector:
            chi, omega = project_gains(rng, serving, owner)
        else:
            chi, omega = _scalar_gains(rng, len(owner), n_t)
        eav.append((owner, pts, chi, omega))

    b_edges = shell_edges(cfg.r_c, 10.0 * cfg.r_c, r_b)
    bss = []
    for j in range(len(b_edges) - 1):
        rng = block_rng(seed, block, _BS, j)
        owner, pts = sample_ppp_batch(lam, Annulus(b_edges[j], b_edges[j + 1]), n, rng)
        bases = random_bases(rng, len(owner), n_t) if vector else None
        bss.append((owner, pts, bases))

    for i, (eo, ep, chi, omega) in enumerate(eav):
        if len(eo) == 0:
            continue
        d0 = np.hypot(ep[:, 0], ep[:, 1])
        an = b * omega * d0 ** (-alpha)
        an += lam * (cfg.p_a) * truncated_pathloss_mean(alpha, r_b, d0)
        for j, (bo, bp, bases) in enumerate(bss):
            if len(bo) == 0:
                continue
            ia, ib = _pairs(eo, bo, n)
            rng = block_rng(seed, block, _PAIR, i, j)
            if vector:
                _, w = project_gains(rng, bases, ib)
            else:
                w = rng.gamma(n_t - 1, size=len(ia))
            dx, dy = ep[ia, 0] - bp[ib, 0], ep[ia, 1] - bp[ib, 1]
            an += np.bincount(ia, b * w * (dx * dx + dy * dy) ** (-0.5 * alpha), minlength=len(eo))
        with np.errstate(divide="ignore"):
            sir = np.where(an > 0, a * chi * d0 ** (-alpha) / np.where(an > 0, an, 1.0), np.inf)
        np.maximum.at(best, eo, sir)
    return best


def _secrecy_count(cfg, seed, vector, sizes, betas, block):
    best = _max_sir_block(cfg, seed, vector, sizes, block)
    return (best[:, None] > betas[None, :]).sum(axis=0)


def simulate_secrecy_outage(cfg: SystemConfig, beta_e, trials: int = DEFAULT_TRIALS, seed: int = 0,
                            vector_channels: bool = False, workers=None):
    """Empirical probability that some eavesdropper's SIR exceeds ``beta_e``.

    Unless set in ``cfg``, the windows are sized for the smallest threshold in
    ``beta_e``, so the same threshold simulated within different lists may use
    different windows.
    """
    betas = _as_betas(beta_e)
    if np.any(betas <= 0):
        raise ValueError("beta_e must be positive")
    if cfg.lambda_e > 0:
        beta_min = float(betas.min())
        cfg = cfg.with_(r_sim_e=eav_window(cfg, beta_min), r_sim=secrecy_bs_window(cfg, beta_min))
    sizes = _block_sizes(trials)
    fn = partial(_secrecy_count, cfg, seed, vector_channels, sizes, betas)
    counts = np.sum(_map_blocks(fn, len(sizes), worker_count(workers)), axis=0)
    return _wrap(counts, trials, seed, np.ndim(beta_e) == 0)


def sample_desired_gain(cfg: SystemConfig, r: float, size: int, seed: int, vector: bool = False):
    """Draws of the estimated-channel gain ||h_hat||^2 for a user at ``r``."""
    rng = np.random.default_rng(seed)
    d2 = float(delta2_array(cfg, r))
    if vector:
        return np.sum(np.abs(_complex_normal(rng, (size, cfg.n_t))) ** 2, axis=1) * d2
    return d2 * rng.gamma(cfg.n_t, size=size)


def sample_interferer_power(cfg: SystemConfig, size: int, seed: int, vector: bool = False):
    """Draws of P_S |f^H w|^2 + P_A/(N_t-1) ||f^H U||^2."""
    rng = np.random.default_rng(seed)
    if vector:
        gs, ga = project_gains(rng, random_bases(rng, size, cfg.n_t), np.arange(size))
    else:
        gs, ga = _scalar_gains(rng, size, cfg.n_t)
    return cfg.p_s * gs + cfg.p_an_per_dim * ga
