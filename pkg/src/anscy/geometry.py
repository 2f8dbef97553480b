"""Poisson point process sampling and the eavesdropper geometry helpers."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Disk:
    radius: float
    center: tuple[float, float] = (0.0, 0.0)

    @property
    def area(self) -> float:
        return math.pi * self.radius ** 2


@dataclass(frozen=True)
class Annulus:
    r_in: float
    r_out: float
    center: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if not 0 <= self.r_in <= self.r_out:
            raise ValueError("annulus needs 0 <= r_in <= r_out")

    @property
    def area(self) -> float:
        return math.pi * (self.r_out ** 2 - self.r_in ** 2)


@dataclass(frozen=True)
class PointSample:
    points: np.ndarray  # shape (n, 2)
    window: Disk | Annulus

    def __len__(self):
        return len(self.points)


def _radial_bounds(window):
    if isinstance(window, Disk):
        return 0.0, window.radius
    return window.r_in, window.r_out


def uniform_radii(rng, r_in, r_out, size):
    """Radii of points uniform over an annulus, by inverting the area CDF."""
    u = rng.random(size)
    return np.sqrt(r_in ** 2 + u * (r_out ** 2 - r_in ** 2))


def _as_rng(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def sample_ppp_batch(intensity: float, window, realizations: int, seed):
    """Independent PPP realizations on one window, flattened.

    Returns ``(owner, points)`` where ``owner[k]`` is the realization index of
    ``points[k]``; points are grouped by realization in increasing order.
    """
    if intensity < 0:
        raise ValueError("intensity must be non-negative")
    rng = _as_rng(seed)
    mean = intensity * window.area
    if not math.isfinite(mean):
        raise ValueError("window area must be finite")
    counts = rng.poisson(mean, realizations) if mean > 0 else np.zeros(realizations, dtype=np.int64)
    total = int(counts.sum())
    r_in, r_out = _radial_bounds(window)
    rho = uniform_radii(rng, r_in, r_out, total)
    ang = rng.uniform(0.0, 2.0 * math.pi, total)
    cx, cy = window.center
    pts = np.column_stack([cx + rho * np.cos(ang), cy + rho * np.sin(ang)])
    owner = np.repeat(np.arange(realizations), counts)
    return owner, pts


def sample_ppp(intensity: float, window, seed) -> PointSample:
    """Homogeneous PPP on a disk or annulus: Poisson count, then uniform placement.

    ``seed`` may be an int, a ``SeedSequence`` or a ``Generator``.
    """
    _, pts = sample_ppp_batch(intensity, window, 1, seed)
    return PointSample(pts, window)


def radial_cdf_sample_cu(r_c: float, u):
    """Inverse CDF of the radial density 2x/Rc^2 of a uniform user in the cell."""
    u_arr = np.asarray(u, dtype=float)
    if np.any((u_arr < 0) | (u_arr > 1)) or np.any(np.isnan(u_arr)):
        raise ValueError("u must lie in [0, 1]")
    out = r_c * np.sqrt(u_arr)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class EavesdropperGeometry:
    """Chord lengths seen from an eavesdropper at distance ``y`` from the target BS.

    For ``y <= r_c`` the eavesdropper sits inside the cell; ``l1`` and ``l2``
    are the distances to the cell boundary along and against the direction
    ``theta``. For ``y > r_c`` rays with ``theta < nu`` cross the cell between
    ``l3`` (entry) and ``l4`` (exit).
    """

    y: float
    r_c: float

    @property
    def inside(self) -> bool:
        return self.y <= self.r_c

    @property
    def nu(self) -> float | None:
        if self.y < self.r_c:
            return None
        return math.asin(self.r_c / self.y)

    def _root(self, theta):
        s = self.y * np.sin(theta)
        # clamp tiny negatives at the tangent angle
        return np.sqrt(np.maximum(self.r_c ** 2 - s * s, 0.0))

    def l1(self, theta):
        return self._root(theta) + self.y * np.cos(theta)

    def l2(self, theta):
        return self._root(theta) - self.y * np.cos(theta)

    def l3(self, theta):
        return self.y * np.cos(theta) - self._root(theta)

    def l4(self, theta):
        return self.l3(theta) + 2.0 * self._root(theta)


def eavesdropper_geometry(y: float, r_c: float) -> EavesdropperGeometry:
    if not y > 0:
        raise ValueError("eavesdropper distance must be positive")
    return EavesdropperGeometry(float(y), float(r_c))


def chord_terms(y, r_c, theta):
    """Array form of (root, y cos theta) so callers can build l1..l4 for many y."""
    root = np.sqrt(np.maximum(r_c ** 2 - (y * np.sin(theta)) ** 2, 0.0))
    return root, y * np.cos(theta)


def truncated_pathloss_mean(alpha: float, radius: float, offset):
    """Integral of |z - e|^-alpha over |z| > radius, for |e| = offset < radius.

    Expands the angular average as rho^-alpha 2F1(a/2, a/2; 1; (y/rho)^2) and
    integrates term by term; used for the deterministic far-field correction
    beyond a finite simulation window.
    """
    q = (np.asarray(offset, dtype=float) / radius) ** 2
    if np.any(q >= 1):
        raise ValueError("offset must lie inside the truncation radius")
    h = alpha / 2.0
    coef = 1.0
    total = np.full_like(q, 1.0 / (alpha - 2.0))
    qn = np.ones_like(q)
    for n in range(1, 400):
        coef *= ((h + n - 1) / n) ** 2
        qn = qn * q
        inc = coef * qn / (alpha - 2.0 + 2 * n)
        total = total + inc
        if np.all(inc <= 1e-17 * total):
            break
    return 2.0 * math.pi * radius ** (2.0 - alpha) * total
