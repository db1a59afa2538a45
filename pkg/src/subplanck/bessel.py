"""Stable evaluation of the normalized Bessel kernel Lambda_nu(xi).

    Lambda_nu(xi) = Gamma(nu + 1) * (xi / 2)**(-nu) * J_nu(xi)

is the uniform average of exp(i xi cos(angle)) over a unit sphere in
2 nu + 2 dimensions, so Lambda_nu(0) = 1 and |Lambda_nu| <= 1.  Orders are
integers and half-odd integers up to nu = 2000; arguments run to 1e6.

Evaluation strategy by regime:

* xi^2 <= 4 nu + 10 -- Taylor series.  Successive terms never grow beyond
  O(1) there, so the alternating sum has no cancellation problem.
* xi >= nu -- J_nu from upward recurrence seeded with machine-accurate
  J0/J1 (power series, then a midpoint rule on the Bessel integral
  representation, then the Hankel asymptotic expansion), or with the
  trigonometric spherical seeds for half-odd orders.  The recurrence is
  neutrally stable in this oscillatory zone.
* otherwise -- the monotone zone nu > xi, where upward recurrence explodes:
  backward (Miller) recurrence with on-the-fly rescaling, renormalized
  against the order-0/1 seeds and assembled in log space.  No intermediate
  quantity overflows or underflows even where Lambda itself is far below
  the double-precision floor (the result then rounds cleanly to 0.0).
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError

NU_MAX = 2000.0
XI_MAX = 1.0e6

_RESCALE = 1e250
_LOG_RESCALE = math.log(_RESCALE)


def scaled_bessel(nu: float, xi):
    """Lambda_nu(xi) for a scalar order and scalar or array argument."""
    nu = float(nu)
    if not 0.0 <= nu <= NU_MAX:
        raise DomainError(f"order must lie in [0, {NU_MAX:g}], got {nu!r}")
    if abs(2.0 * nu - round(2.0 * nu)) > 1e-9:
        raise DomainError(f"order must be an integer or half-odd integer, got {nu!r}")
    arr = np.asarray(xi, dtype=float)
    scalar = arr.ndim == 0
    x = np.atleast_1d(arr).astype(float)
    if not np.all(np.isfinite(x)) or np.any(x < 0.0) or np.any(x > XI_MAX):
        raise DomainError(f"argument must lie in [0, {XI_MAX:g}]")

    out = np.empty_like(x)
    series = x * x <= 4.0 * nu + 10.0
    if np.any(series):
        out[series] = _lambda_series(nu, x[series])
    osc = ~series & (x >= nu)
    if np.any(osc):
        out[osc] = _lambda_oscillatory(nu, x[osc])
    mono = ~series & (x < nu)
    if np.any(mono):
        out[mono] = _lambda_miller(nu, x[mono])
    return float(out[0]) if scalar else out


def _lambda_series(nu: float, x: np.ndarray) -> np.ndarray:
    q = -0.25 * x * x
    term = np.ones_like(x)
    total = np.ones_like(x)
    for m in range(1, 400):
        term = term * q / (m * (nu + m))
        total += term
        if np.max(np.abs(term)) < 1e-18:
            break
    return total


def _j01(x: np.ndarray):
    """J0(x) and J1(x) to near machine accuracy, x >= 0."""
    j0 = np.empty_like(x)
    j1 = np.empty_like(x)

    small = x <= 4.0
    if np.any(small):
        xs = x[small]
        q = -0.25 * xs * xs
        t0 = np.ones_like(xs)
        s0 = np.ones_like(xs)
        t1 = np.ones_like(xs)
        s1 = np.ones_like(xs)
        for m in range(1, 40):
            t0 = t0 * q / (m * m)
            s0 += t0
            t1 = t1 * q / (m * (m + 1))
            s1 += t1
            if max(np.max(np.abs(t0)), np.max(np.abs(t1))) < 1e-18:
                break
        j0[small] = s0
        j1[small] = 0.5 * xs * s1

    mid = (x > 4.0) & (x <= 150.0)
    if np.any(mid):
        xm = x[mid]
        # midpoint rule on (1/pi) int_0^pi cos(n t - x sin t) dt; error decays
        # like a Bessel function of order ~2*nodes, i.e. machine-zero here
        nodes = int(0.5 * float(np.max(xm))) + 32
        theta = (np.arange(nodes) + 0.5) * (np.pi / nodes)
        arg = np.outer(xm, np.sin(theta))
        j0[mid] = np.mean(np.cos(arg), axis=1)
        j1[mid] = np.mean(np.cos(theta[None, :] - arg), axis=1)

    big = x > 150.0
    if np.any(big):
        j0[big] = _hankel(0, x[big])
        j1[big] = _hankel(1, x[big])
    return j0, j1


def _hankel(order: int, x: np.ndarray) -> np.ndarray:
    """Large-argument asymptotic expansion; truncation error < 1e-17 for x > 150."""
    mu = 4.0 * order * order
    p = np.ones_like(x)
    q = np.zeros_like(x)
    term = np.ones_like(x)
    for k in range(18):
        term = term * (mu - (2 * k + 1) ** 2) / (8.0 * (k + 1) * x)
        j = k + 1
        sign = -1.0 if (j // 2) % 2 else 1.0
        if j % 2:
            q = q + sign * term
        else:
            p = p + sign * term
        if np.max(np.abs(term)) < 1e-18:
            break
    chi = x - (0.5 * order + 0.25) * np.pi
    return np.sqrt(2.0 / (np.pi * x)) * (p * np.cos(chi) - q * np.sin(chi))


def _sph_seeds(x: np.ndarray):
    s = np.sin(x)
    c = np.cos(x)
    return s / x, s / (x * x) - c / x


def _lambda_oscillatory(nu: float, x: np.ndarray) -> np.ndarray:
    if nu == round(nu):
        order = int(round(nu))
        j0, j1 = _j01(x)
        if order == 0:
            jnu = j0
        elif order == 1:
            jnu = j1
        else:
            jm, jc = j0, j1
            for m in range(1, order):
                jm, jc = jc, (2.0 * m / x) * jc - jm
            jnu = jc
        lead = math.lgamma(nu + 1.0) - nu * np.log(0.5 * x)
    else:
        ell = int(round(nu - 0.5))
        g0, g1 = _sph_seeds(x)
        if ell == 0:
            jell = g0
        elif ell == 1:
            jell = g1
        else:
            gm, gc = g0, g1
            for m in range(1, ell):
                gm, gc = gc, ((2.0 * m + 1.0) / x) * gc - gm
            jell = gc
        jnu = jell
        lead = (math.lgamma(nu + 1.0) - nu * np.log(0.5 * x)
                + 0.5 * np.log(2.0 * x / np.pi))
    with np.errstate(divide="ignore"):
        ln = lead + np.log(np.abs(jnu))
    return np.sign(jnu) * np.exp(ln)


def _lambda_miller(nu: float, x: np.ndarray) -> np.ndarray:
    half_order = nu != round(nu)
    if half_order:
        target = int(round(nu - 0.5))
        base0, base1 = _sph_seeds(x)
        lead = (math.lgamma(nu + 1.0) - nu * np.log(0.5 * x)
                + 0.5 * np.log(2.0 * x / np.pi))

        def coef(m):
            return 2.0 * m + 1.0
    else:
        target = int(round(nu))
        base0, base1 = _j01(x)
        lead = math.lgamma(nu + 1.0) - nu * np.log(0.5 * x)

        def coef(m):
            return 2.0 * m

    start = target + 40 + int(15.0 * max(1.0, nu) ** (1.0 / 3.0))
    f_hi = np.zeros_like(x)
    f = np.full_like(x, 1e-30)
    logscale = np.zeros_like(x)
    ln_target = np.zeros_like(x)
    sign_target = np.ones_like(x)

    with np.errstate(divide="ignore"):
        for m in range(start, 0, -1):
            f_hi, f = f, (coef(m) / x) * f - f_hi
            order = m - 1
            if order == target:
                ln_target = np.log(np.abs(f)) + logscale
                sign_target = np.sign(f)
            big = np.abs(f) > _RESCALE
            if np.any(big):
                f = np.where(big, f / _RESCALE, f)
                f_hi = np.where(big, f_hi / _RESCALE, f_hi)
                logscale = np.where(big, logscale + _LOG_RESCALE, logscale)
        ln0 = np.log(np.abs(f)) + logscale
        sign0 = np.sign(f)
        ln1 = np.log(np.abs(f_hi)) + logscale
        sign1 = np.sign(f_hi)

        use0 = np.abs(base0) >= np.abs(base1)
        ln_base = np.where(use0, ln0, ln1)
        sign_base = np.where(use0, sign0, sign1)
        ref = np.where(use0, base0, base1)
        ln_ref = np.log(np.abs(ref))

    ln_j = ln_target - ln_base + ln_ref
    sign = sign_target * sign_base * np.sign(ref)
    return sign * np.exp(lead + ln_j)
