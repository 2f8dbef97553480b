"""Special functions: Gauss hypergeometric 2F1 and (incomplete) gamma functions.

The 2F1 engine works on numpy arrays of real ``z`` for fixed real parameters
and maps every argument into ``[0, 1/2]`` before summing the Gauss series:

* ``z < 0``: Pfaff transform to ``w = z / (z - 1)`` in ``(0, 1)``;
* ``1/2 < w < 1``: linear (``1 - w``) connection formula.

The same engine runs in extended precision when handed ``mpmath.mpf`` object
arrays (see :func:`hyp2f1_array` with ``precision=...``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

MAX_TERMS = 10_000
_SERIES_RTOL = 1e-16


@dataclass(frozen=True)
class SpecFunResult:
    value: float
    est_abs_err: float


class _FloatCtx:
    eps = np.finfo(float).eps
    dtype = float

    @staticmethod
    def gamma(x):
        return math.gamma(x)

    @staticmethod
    def convert(x):
        return np.asarray(x, dtype=float)

    @staticmethod
    def scalar(x):
        return float(x)


class _MpCtx:
    dtype = object

    def __init__(self, dps):
        self.dps = dps
        self.eps = mpmath.mpf(10) ** (-dps)

    def gamma(self, x):
        return mpmath.gamma(x)

    def convert(self, x):
        arr = np.asarray(x, dtype=object)
        return np.vectorize(mpmath.mpf, otypes=[object])(arr) if arr.size else arr

    def scalar(self, x):
        return mpmath.mpf(x)


def _is_nonpos_int(x, tol=0.0):
    return x <= 0 and abs(x - round(x)) <= tol


def _rgamma(x, ctx):
    if _is_nonpos_int(float(x)):
        return 0
    return 1 / ctx.gamma(x)


def _series(a, b, c, z, ctx):
    """Gauss series summed termwise; returns (value, abs_err)."""
    one = ctx.scalar(1)
    term = np.full(z.shape, one, dtype=ctx.dtype)
    total = term.copy()
    abs_sum = np.abs(term)
    quiet = np.zeros(z.shape, dtype=int)
    rtol = max(_SERIES_RTOL, float(ctx.eps)) if ctx.dtype is float else ctx.eps
    last = np.abs(term)
    converged = False
    for k in range(MAX_TERMS):
        term = term * ((a + k) * (b + k) / ((c + k) * (k + 1))) * z
        total = total + term
        last = np.abs(term)
        abs_sum = abs_sum + last
        small = last <= rtol * np.abs(total)
        quiet = np.where(small, quiet + 1, 0)
        if np.all(quiet >= 3):
            converged = True
            break
    err = abs_sum * (4 * ctx.eps)
    if not converged:
        err = err + last
    return total, err


def _gauss_half(a, b, c, w, one_minus_w, ctx):
    """2F1 for 0 <= w < 1: series up to 1/2, connection formula above."""
    out = np.empty(w.shape, dtype=ctx.dtype)
    err = np.empty(w.shape, dtype=ctx.dtype)
    low = w <= 0.5
    if np.any(low):
        out[low], err[low] = _series(a, b, c, w[low], ctx)
    high = ~low
    if np.any(high):
        s = c - a - b
        wh = w[high]
        if abs(float(s) - round(float(s))) < 1e-9:
            # connection formula degenerates; sum the slowly converging series
            out[high], err[high] = _series(a, b, c, wh, ctx)
        else:
            one_m = one_minus_w[high]
            g_c = ctx.gamma(c)
            coef1 = g_c * ctx.gamma(s) * _rgamma(c - a, ctx) * _rgamma(c - b, ctx)
            coef2 = g_c * ctx.gamma(-s) * _rgamma(a, ctx) * _rgamma(b, ctx)
            f1, e1 = _series(a, b, 1 - s, one_m, ctx)
            f2, e2 = _series(c - a, c - b, 1 + s, one_m, ctx)
            lead = one_m ** s
            t1 = coef1 * f1
            t2 = coef2 * lead * f2
            out[high] = t1 + t2
            err[high] = (
                abs(coef1) * e1
                + abs(coef2) * lead * e2
                + (np.abs(t1) + np.abs(t2)) * (8 * ctx.eps)
            )
    return out, err


def _hyp2f1_engine(a, b, c, z, ctx, one_minus_z=None):
    z = ctx.convert(z)
    a, b, c = ctx.scalar(a), ctx.scalar(b), ctx.scalar(c)
    comp = 1 - z if one_minus_z is None else ctx.convert(one_minus_z)
    out = np.empty(z.shape, dtype=ctx.dtype)
    err = np.empty(z.shape, dtype=ctx.dtype)
    pos = z >= 0
    if np.any(pos):
        zp = z[pos]
        out[pos], err[pos] = _gauss_half(a, b, c, zp, comp[pos], ctx)
    neg = ~pos
    if np.any(neg):
        zn = z[neg]
        w = zn / (zn - 1)
        pref = (1 - zn) ** (-a)
        f, e = _gauss_half(a, c - b, c, w, 1 / (1 - zn), ctx)
        out[neg] = pref * f
        err[neg] = pref * e
    return out, err


def _check_params(c, z, one_minus_z=None):
    if _is_nonpos_int(c, 1e-14):
        raise ValueError(f"hyp2f1: c={c} is a non-positive integer")
    if one_minus_z is not None:
        # z may round to 1 while the complement is still known accurately
        if np.any(np.asarray(one_minus_z, dtype=float) <= 0):
            raise ValueError("hyp2f1: argument z must be < 1")
    elif np.any(np.asarray(z, dtype=float) >= 1):
        raise ValueError("hyp2f1: argument z must be < 1")


def hyp2f1_array(a, b, c, z, precision=None, return_error=False, one_minus_z=None):
    """Vectorised real 2F1(a, b; c; z) for ``z < 1``.

    With ``precision`` (decimal digits) the evaluation runs on mpmath numbers
    and an object array is returned. ``one_minus_z`` lets callers that know
    ``1 - z`` more accurately than ``z`` pass it in (matters close to 1).
    """
    _check_params(float(c), z, one_minus_z)
    ctx = _FloatCtx() if precision is None else _MpCtx(precision)
    if precision is None:
        val, err = _hyp2f1_engine(a, b, c, z, ctx, one_minus_z)
    else:
        with mpmath.workdps(precision):
            val, err = _hyp2f1_engine(a, b, c, z, ctx, one_minus_z)
    if return_error:
        return val, err
    return val


def hyp2f1(a: float, b: float, c: float, z: float) -> SpecFunResult:
    """Gauss hypergeometric function with an absolute error estimate."""
    val, err = hyp2f1_array(a, b, c, np.array([z], dtype=float), return_error=True)
    value, est = float(val[0]), float(err[0])
    if not math.isfinite(value):
        raise FloatingPointError(f"hyp2f1({a}, {b}, {c}, {z}) is not finite")
    return SpecFunResult(value, est)


def gamma_fn(a: float) -> SpecFunResult:
    if a <= 0:
        raise ValueError("gamma_fn requires a > 0")
    val = math.gamma(a)
    return SpecFunResult(val, 4 * np.finfo(float).eps * val)


def _lower_series(a, x):
    # gamma(a, x) = x^a e^-x sum x^n / (a (a+1) ... (a+n))
    term = 1.0 / a
    total = term
    n = 0
    while abs(term) > 1e-17 * abs(total) and n < MAX_TERMS:
        n += 1
        term *= x / (a + n)
        total += term
    return math.exp(a * math.log(x) - x) * total


def _upper_cf(a, x):
    # modified Lentz evaluation of the Legendre continued fraction
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, MAX_TERMS):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return math.exp(a * math.log(x) - x) * h


def _negative_lower(a, x):
    # integer a, x < 0: gamma(a, x) = x^a sum_n |x|^n / (n! (a + n)); all terms
    # share the sign of x^a
    y = -x
    term = 1.0
    total = 1.0 / a
    n = 0
    while n < MAX_TERMS:
        n += 1
        term *= y / n
        inc = term / (a + n)
        total += inc
        if inc < 1e-17 * total:
            break
    return (x ** int(a)) * total


def gamma_lower(a: float, x: float) -> SpecFunResult:
    """Lower incomplete gamma. Negative ``x`` is accepted for integer ``a``."""
    if a <= 0:
        raise ValueError("gamma_lower requires a > 0")
    if x < 0:
        if a != int(a):
            raise ValueError("gamma_lower: x < 0 only defined here for integer a")
        val = _negative_lower(a, x)
        return SpecFunResult(val, 8 * np.finfo(float).eps * abs(val))
    if x == 0:
        return SpecFunResult(0.0, 0.0)
    if x < a + 1:
        val = _lower_series(a, x)
    else:
        val = math.gamma(a) - _upper_cf(a, x)
    return SpecFunResult(val, 8 * np.finfo(float).eps * max(abs(val), math.gamma(a)))


def gamma_upper(a: float, x: float) -> SpecFunResult:
    if a <= 0:
        raise ValueError("gamma_upper requires a > 0")
    if x < 0:
        raise ValueError("gamma_upper requires x >= 0")
    if x == 0:
        return gamma_fn(a)
    if x < a + 1:
        val = math.gamma(a) - _lower_series(a, x)
    else:
        val = _upper_cf(a, x)
    return SpecFunResult(val, 8 * np.finfo(float).eps * max(abs(val), math.gamma(a)))


def gamma_lower_array(a: int, x):
    """Vectorised lower incomplete gamma for a positive integer ``a``, any real x.

    Uses the finite-sum closed form away from the origin and the alternating-free
    series near it.
    """
    x = np.asarray(x, dtype=float)
    n = int(a)
    if n != a or n < 1:
        raise ValueError("gamma_lower_array needs a positive integer order")
    out = np.empty_like(x)
    near = np.abs(x) < 2.0 + n
    if np.any(~near):
        xf = x[~near]
        partial = np.zeros_like(xf)
        term = np.ones_like(xf)
        for k in range(n):
            if k:
                term = term * xf / k
            partial += term
        out[~near] = math.factorial(n - 1) * (1.0 - np.exp(-xf) * partial)
    if np.any(near):
        out[near] = np.array([
            _negative_lower(n, v) if v < 0 else (_lower_series(n, v) if v > 0 else 0.0)
            for v in x[near]
        ])
    return out
