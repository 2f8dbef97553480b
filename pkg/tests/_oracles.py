"""Independent high-precision references used across the analysis tests."""
import math

import mpmath


def mgf(s, a, b, n_t):
    """E[exp(-s P)] for P = a Exp(1) + b Gamma(n_t - 1, 1)."""
    return 1 / ((1 + a * s) * (1 + b * s) ** (n_t - 1))


def mgf_derivative(s, k, a, b, n_t):
    """k-th derivative of ``mgf`` in s by the Leibniz rule."""
    total = 0
    for j in range(k + 1):
        d1 = (-1) ** (k - j) * mpmath.factorial(k - j) * a ** (k - j) * (1 + a * s) ** (-1 - (k - j))
        d2 = (-1) ** j * mpmath.rf(n_t - 1, j) * b ** j * (1 + b * s) ** (-(n_t - 1) - j)
        total += mpmath.binomial(k, j) * d1 * d2
    return total


def _log_laplace(mu, lam, alpha, r_u, a, b, n_t):
    # at the caller's working precision
    f = lambda rho: (1 - mgf(mu * rho ** -alpha, a, b, n_t)) * rho  # noqa: E731
    pts = [r_u, 2 * r_u, 5 * r_u, 20 * r_u, 100 * r_u, mpmath.inf]
    return -2 * mpmath.pi * lam * mpmath.quad(f, pts)


def log_laplace(mu, lam, alpha, r_u, a, b, n_t, dps=30):
    with mpmath.workdps(dps):
        return float(_log_laplace(mpmath.mpf(mu), lam, alpha, r_u, a, b, n_t))


def psi(m, mu, lam, alpha, r_u, a, b, n_t, dps=50):
    """(-mu)^m / m! * d^m/dmu^m log L, differentiating under the integral."""
    with mpmath.workdps(dps):
        mu = mpmath.mpf(mu)

        def f(rho):
            g = rho ** -alpha
            return g ** m * mgf_derivative(mu * g, m, a, b, n_t) * rho

        integral = mpmath.quad(f, [r_u, 2 * r_u, 5 * r_u, 20 * r_u, 100 * r_u, mpmath.inf])
        return float((-mu) ** m / math.factorial(m) * 2 * mpmath.pi * lam * integral)


def _taylor_derivatives(h, x, kmax, radius, m=64):
    """h^(k)(x) for k <= kmax from the Cauchy integral on a circle (trapezoid rule)."""
    vals = [h(x + radius * mpmath.expjpi(2 * mpmath.mpf(j) / m)) for j in range(m)]
    out = []
    for k in range(kmax + 1):
        acc = mpmath.fsum(v * mpmath.expjpi(-2 * mpmath.mpf(j) * k / m) for j, v in enumerate(vals))
        out.append(mpmath.re(acc) * mpmath.factorial(k) / (m * radius ** k))
    return out


def small_ball_outage(mu, p_i, lam, alpha, r_u, a, b, n_t, dps=30):
    """Pr[Gamma(n_t,1) <= mu (p_i + I)] = 1 - sum_k (-mu)^k/k! d^k/dmu^k [exp(-mu p_i) L(mu)]."""
    with mpmath.workdps(dps):
        mu = mpmath.mpf(mu)

        def h(s):
            return mpmath.exp(-s * p_i + _log_laplace(s, lam, alpha, r_u, a, b, n_t))

        ders = _taylor_derivatives(h, mu, n_t - 1, mu / 2)
        total = mpmath.fsum((-mu) ** k / mpmath.factorial(k) * d for k, d in enumerate(ders))
        return float(1 - total)
