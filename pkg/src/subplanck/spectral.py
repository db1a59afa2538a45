"""Band-limited interpolation and translation on uniform grids.

The samples are treated as one period of a trigonometric interpolant.  That
model is justified here because every state reaching these routines has
passed a boundary-decay check, so wraparound carries negligible amplitude.
"""

from __future__ import annotations

import numpy as np


def upsample_double(values: np.ndarray) -> np.ndarray:
    """Resample onto the twice-finer grid by spectral zero padding.

    The Nyquist bin is split evenly between the +/- frequency copies, so real
    input stays real and the original samples are reproduced exactly at even
    output indices.
    """
    values = np.asarray(values, dtype=complex)
    n = values.size
    half = n // 2
    spec = np.fft.fft(values)
    out = np.zeros(2 * n, dtype=complex)
    out[:half] = spec[:half]
    out[half] = 0.5 * spec[half]
    out[2 * n - half] = 0.5 * spec[half]
    out[2 * n - half + 1:] = spec[half + 1:]
    return 2.0 * np.fft.ifft(out)


def shift(values: np.ndarray, delta: float, spacing: float) -> np.ndarray:
    """Evaluate the interpolant at x + delta:  out[i] = f(x_i + delta).

    The Nyquist bin gets cos(k_N * delta), the average of the two aliased
    phase choices, so real input stays real up to roundoff.
    """
    values = np.asarray(values, dtype=complex)
    n = values.size
    k = 2.0 * np.pi * np.fft.fftfreq(n, d=spacing)
    phase = np.exp(1j * k * delta)
    phase[n // 2] = np.cos(k[n // 2] * delta)
    return np.fft.ifft(np.fft.fft(values) * phase)


def shift2d(values: np.ndarray, delta0: float, delta1: float,
            spacing0: float, spacing1: float) -> np.ndarray:
    """Band-limited translation along both axes: out[i,j] = f(x_i+d0, y_j+d1)."""
    n0, n1 = values.shape
    k0 = 2.0 * np.pi * np.fft.fftfreq(n0, d=spacing0)
    k1 = 2.0 * np.pi * np.fft.fftfreq(n1, d=spacing1)
    ph0 = np.exp(1j * k0 * delta0)
    ph0[n0 // 2] = np.cos(k0[n0 // 2] * delta0)
    ph1 = np.exp(1j * k1 * delta1)
    ph1[n1 // 2] = np.cos(k1[n1 // 2] * delta1)
    spec = np.fft.fft2(values) * ph0[:, None] * ph1[None, :]
    return np.fft.ifft2(spec)
