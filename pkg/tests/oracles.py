"""Independent numerical oracles used only by the test suite.

Everything here deliberately avoids the package's evaluation paths: plain
Taylor series, trapezoid quadrature of integral representations, and finite
differences, so that agreement with the package is a genuine cross-check.
"""

import numpy as np
from scipy.optimize import brentq


def j0_series(x: float) -> float:
    """J0 by direct Taylor series; accurate for |x| <= ~12."""
    q = -0.25 * x * x
    term, total = 1.0, 1.0
    for m in range(1, 60):
        term *= q / (m * m)
        total += term
        if abs(term) < 1e-19:
            break
    return total


def j1_series(x: float) -> float:
    q = -0.25 * x * x
    term, total = 1.0, 1.0
    for m in range(1, 60):
        term *= q / (m * (m + 1))
        total += term
        if abs(term) < 1e-19:
            break
    return 0.5 * x * total


def jn_trapezoid(n: int, x: float, nodes: int = 800) -> float:
    """J_n via the trapezoid rule on (1/pi) int_0^pi cos(n t - x sin t) dt."""
    theta = np.linspace(0.0, np.pi, nodes + 1)
    f = np.cos(n * theta - x * np.sin(theta))
    return float(np.trapz(f, theta) / np.pi)


def lambda_poisson(nu: float, xi: float, nodes: int = 400) -> float:
    """Lambda_nu from the Poisson integral representation by Gauss-Legendre."""
    t, w = np.polynomial.legendre.leggauss(nodes)
    theta = 0.5 * np.pi * (t + 1.0)
    weight = 0.5 * np.pi * w
    s = np.sin(theta) ** (2.0 * nu)
    num = float(np.sum(np.cos(xi * np.cos(theta)) * s * weight))
    den = float(np.sum(s * weight))
    return num / den


def j0_first_root() -> float:
    return brentq(j0_series, 2.0, 3.0, xtol=1e-14)


def j1_first_root() -> float:
    return brentq(j1_series, 3.0, 4.5, xtol=1e-14)


def gaussian_overlap(dx: float, dp: float, sigma: float, hbar: float) -> float:
    """<D> for a centered Gaussian packet (real by symmetry)."""
    return float(np.exp(-dx * dx / (8.0 * sigma ** 2)
                        - sigma ** 2 * dp * dp / (2.0 * hbar ** 2)))


def cat_overlap_dp(dp, half_sep: float, sigma: float, hbar: float):
    """<D(dp, 0)> for packets at +-half_sep: interference cosine times the
    Gaussian envelope, offset by the tiny packet overlap."""
    dp = np.asarray(dp, dtype=float)
    eps = np.exp(-half_sep ** 2 / (2.0 * sigma ** 2))
    env = np.exp(-sigma ** 2 * dp ** 2 / (2.0 * hbar ** 2))
    return env * (np.cos(dp * half_sep / hbar) + eps) / (1.0 + eps)


def cat_overlap_dx(dx, half_sep: float, sigma: float, hbar: float):
    """<D(0, dx)> for packets at +-half_sep."""
    dx = np.asarray(dx, dtype=float)
    eps = np.exp(-half_sep ** 2 / (2.0 * sigma ** 2))
    direct = 2.0 * np.exp(-dx ** 2 / (8.0 * sigma ** 2))
    cross = (np.exp(-(2.0 * half_sep + dx) ** 2 / (8.0 * sigma ** 2))
             + np.exp(-(2.0 * half_sep - dx) ** 2 / (8.0 * sigma ** 2)))
    return (direct + cross) / (2.0 * (1.0 + eps))


def wigner_gaussian(x, p, sigma: float, hbar: float):
    return np.exp(-x ** 2 / (2.0 * sigma ** 2)
                  - 2.0 * sigma ** 2 * p ** 2 / hbar ** 2) / (np.pi * hbar)


def wigner_cat(x, p, half_sep: float, sigma: float, hbar: float):
    """Two-packet cat Wigner function: two displaced blobs plus the central
    interference term oscillating in p."""
    a = half_sep
    eps = np.exp(-a ** 2 / (2.0 * sigma ** 2))
    env = np.exp(-2.0 * sigma ** 2 * p ** 2 / hbar ** 2) / (np.pi * hbar)
    blobs = (np.exp(-(x - a) ** 2 / (2.0 * sigma ** 2))
             + np.exp(-(x + a) ** 2 / (2.0 * sigma ** 2)))
    fringe = 2.0 * np.exp(-x ** 2 / (2.0 * sigma ** 2)) * np.cos(2.0 * a * p / hbar)
    return env * (blobs + fringe) / (2.0 * (1.0 + eps))


def momentum_mean_quadrature(psi) -> float:
    """<p> by direct quadrature of conj(psi) (-i hbar d/dx) psi with an
    8th-order finite-difference derivative (edges dropped; the states decay)."""
    amps = psi.amplitudes
    dx = psi.grid.dx
    n = len(amps)
    coeffs = (4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0)
    deriv = np.zeros(n, dtype=complex)
    for k, c in enumerate(coeffs, start=1):
        deriv[4:n - 4] += c * (amps[4 + k:n - 4 + k] - amps[4 - k:n - 4 - k])
    deriv /= dx
    integrand = np.conj(amps) * (-1j * psi.hbar) * deriv
    return float(np.real(np.sum(integrand) * dx))


def sample_skewness(values) -> float:
    values = np.asarray(values, dtype=float)
    m = values.mean()
    s = values.std(ddof=0)
    return float(np.mean(((values - m) / s) ** 3))
