"""Wigner transform on a uniform grid, marginals, and fringe metrology.

The transform Fourier-analyzes the two-point correlation over the separation
variable:

    W(x, p) = (1/2 pi hbar) * integral ds  exp(i p s / hbar)
              * conj(psi(x + s/2)) * psi(x - s/2)

Half-grid evaluations psi(x +- s/2) come from band-limited (spectral)
interpolation onto the twice-finer grid, which is what preserves the purity
identity (2 pi hbar) * sum W^2 dx dp = 1 to well below 1e-5.  The momentum
grid is fixed by the x grid: n points with spacing dp = 2 pi hbar / (n dx),
covering the full Nyquist band.  States must decay at the grid edges and be
momentum-band-limited to that band; both are checked.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from . import ioutil, spectral
from .errors import RingingError, SupportError
from .statekit import BOUNDARY_DECAY, Grid1D, WaveFunction1D, check_boundary_decay

_ROW_BLOCK = 256


@dataclass(frozen=True, eq=False)
class WignerGrid:
    """Real W(x_i, p_j) on the grid's x axis and its conjugate momentum axis."""

    grid: Grid1D
    values: np.ndarray
    hbar: float = 1.0

    def __post_init__(self):
        if self.hbar <= 0:
            raise ValueError("hbar must be positive")
        vals = np.array(self.values, dtype=float)
        n = self.grid.n
        if vals.shape != (n, n):
            raise ValueError(f"values must have shape ({n}, {n})")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def dx(self) -> float:
        return self.grid.dx

    @property
    def dp(self) -> float:
        return 2.0 * np.pi * self.hbar / (self.grid.n * self.grid.dx)

    @property
    def x_values(self) -> np.ndarray:
        return self.grid.points

    @property
    def p_values(self) -> np.ndarray:
        return (np.arange(self.grid.n) - self.grid.n // 2) * self.dp


def _check_momentum_band(psi: WaveFunction1D, threshold: float = BOUNDARY_DECAY) -> None:
    """States must carry no weight at the momentum-band edge; aliasing would
    otherwise mimic sub-Planck structure."""
    spec = np.abs(np.fft.fft(psi.amplitudes)) ** 2
    n = psi.grid.n
    width = max(1, n // 64)
    edge = float(spec[n // 2 - width: n // 2 + width + 1].max())
    rel = edge / float(spec.max())
    if rel > threshold:
        raise SupportError(
            f"state is not momentum-band-limited: relative spectral density "
            f"{rel:.3e} at the Nyquist momentum exceeds {threshold:g}"
        )


def wigner_transform(psi: WaveFunction1D) -> WignerGrid:
    """Wigner function of a normalized, grid-supported pure state."""
    check_boundary_decay(psi)
    _check_momentum_band(psi)
    n = psi.grid.n
    dx = psi.grid.dx
    hbar = psi.hbar
    fine = spectral.upsample_double(psi.amplitudes)

    # FFT-ordered half-grid offsets k: s = k*dx, psi(x_i +- s/2) = fine[2i +- k]
    idx = np.arange(2 * n)
    kk = np.where(idx < n, idx, idx - 2 * n)
    sign = np.where(kk % 2 == 0, 1.0, -1.0)

    w = np.empty((n, n), dtype=complex)
    for lo in range(0, n, _ROW_BLOCK):
        hi = min(lo + _ROW_BLOCK, n)
        center = 2 * np.arange(lo, hi)[:, None]
        ip = center + kk[None, :]
        im = center - kk[None, :]
        ok = (ip >= 0) & (ip < 2 * n) & (im >= 0) & (im < 2 * n)
        corr = np.where(
            ok,
            np.conj(fine[np.clip(ip, 0, 2 * n - 1)]) * fine[np.clip(im, 0, 2 * n - 1)],
            0.0,
        )
        corr *= sign[None, :]
        # The coarse p grid aliases offsets k and k-n; fold before the FFT.
        folded = corr[:, :n] + corr[:, n:]
        w[lo:hi] = n * np.fft.ifft(folded, axis=1)
    w *= dx / (2.0 * np.pi * hbar)

    scale = float(np.max(np.abs(w.real)))
    residue = float(np.max(np.abs(w.imag)))
    if residue > 1e-10 * scale:
        raise RuntimeError(
            f"imaginary residue {residue / scale:.3e} of the transform exceeds 1e-10; "
            "the state is under-resolved on this grid"
        )
    values = np.ascontiguousarray(w.real)

    out = WignerGrid(psi.grid, values, hbar)
    total = float(values.sum() * out.dx * out.dp)
    if abs(total - 1.0) > 1e-6:
        raise RuntimeError(f"Wigner normalization {total!r} deviates from 1 by more than 1e-6")
    bound = 1.0 / (np.pi * hbar) + 1e-6
    if float(np.max(np.abs(values))) > bound:
        raise RuntimeError("Wigner values exceed the pure-state bound 1/(pi hbar)")
    return out


def normalization(w: WignerGrid) -> float:
    """sum W dx dp; equals 1 for a transform of a normalized state."""
    return float(w.values.sum() * w.dx * w.dp)


def purity(w: WignerGrid) -> float:
    """(2 pi hbar) * sum W^2 dx dp; equals 1 for pure states."""
    return float(2.0 * np.pi * w.hbar * np.sum(w.values ** 2) * w.dx * w.dp)


def marginal_x(w: WignerGrid) -> np.ndarray:
    """Position density: sum_j W(x_i, p_j) dp, equal to |psi(x_i)|^2."""
    return w.values.sum(axis=1) * w.dp


def fringe_wavelength(w: WignerGrid, axis: str, window) -> float:
    """Dominant oscillation period of W along `axis` inside `window`.

    `window` is (x_lo, x_hi, p_lo, p_hi).  The period comes from the peak of
    the zero-padded power spectrum averaged over the transverse rows of the
    window; a power-spectrum peak is robust to the Gaussian envelope where
    zero-crossing counting is not.  Raises RingingError when the central
    slice shows fewer than 4 sign changes.
    """
    x_lo, x_hi, p_lo, p_hi = window
    x_sel = np.nonzero((w.x_values >= x_lo) & (w.x_values <= x_hi))[0]
    p_sel = np.nonzero((w.p_values >= p_lo) & (w.p_values <= p_hi))[0]
    if x_sel.size == 0 or p_sel.size == 0:
        raise ValueError("window does not intersect the grid")

    if axis == "p":
        block = w.values[np.ix_(x_sel, p_sel)]
        spacing = w.dp
    elif axis == "x":
        block = w.values[np.ix_(x_sel, p_sel)].T
        spacing = w.dx
    else:
        raise ValueError("axis must be 'x' or 'p'")
    # block rows are transverse positions, columns run along the chosen axis
    if block.shape[1] < 8:
        raise ValueError("window too narrow along the chosen axis")

    center = block[block.shape[0] // 2]
    signs = np.sign(center)
    changes = int(np.sum(signs[:-1] * signs[1:] < 0))
    if changes < 4:
        raise RingingError(f"no fringes detected: {changes} sign changes in the window")

    npad = 16 * block.shape[1]
    taper = np.hanning(block.shape[1])
    rows = (block - block.mean(axis=1, keepdims=True)) * taper[None, :]
    power = np.abs(np.fft.rfft(rows, n=npad, axis=1)) ** 2
    spectrum = power.mean(axis=0)
    freqs = np.fft.rfftfreq(npad, d=spacing)
    peak = int(np.argmax(spectrum[1:])) + 1
    # parabolic refinement on log power
    if 1 <= peak < spectrum.size - 1 and spectrum[peak - 1] > 0 and spectrum[peak + 1] > 0:
        y0, y1, y2 = np.log(spectrum[peak - 1: peak + 2])
        denom = y0 - 2.0 * y1 + y2
        shift = 0.5 * (y0 - y2) / denom if denom < 0 else 0.0
    else:
        shift = 0.0
    f_star = freqs[peak] + shift * (freqs[1] - freqs[0])
    return float(1.0 / f_star)


# ---------------------------------------------------------------------------
# serialization

_MAGIC = b"WGR1"
_HEADER = struct.Struct("<4s4xQQd")  # magic, pad, n_x, n_p, hbar -> 32 bytes


def write_wigner_csv(w: WignerGrid, path, metadata: dict | None = None) -> None:
    """CSV columns x,p,W in row-major (x-outer) order."""
    meta = dict(metadata or {})
    meta.update(format="wigner-grid", n=w.grid.n, hbar=w.hbar,
                x_min=w.grid.x_min, x_max=w.grid.x_max)
    xs = w.x_values.tolist()
    ps = w.p_values.tolist()
    vals = w.values.tolist()
    rows = [
        f"{xs[i]!r},{ps[j]!r},{vals[i][j]!r}"
        for i in range(w.grid.n)
        for j in range(w.grid.n)
    ]
    ioutil.write_table(path, meta, ["x", "p", "W"], rows)


def read_wigner_csv(path):
    """Reconstruct (WignerGrid, metadata) from write_wigner_csv output."""
    meta, header, rows = ioutil.read_table(path)
    if header != ["x", "p", "W"]:
        raise ValueError(f"not a Wigner CSV file: header {header}")
    n = int(meta["n"])
    grid = Grid1D(float(meta["x_min"]), float(meta["x_max"]), n)
    values = np.array([float(r[2]) for r in rows]).reshape(n, n)
    return WignerGrid(grid, values, float(meta["hbar"])), meta


def write_wigner_binary(w: WignerGrid, path) -> None:
    """32-byte header (magic 'WGR1', n_x, n_p, hbar; little endian) followed
    by the row-major float64 matrix.  Axis ranges are not stored; the CSV
    format is the self-describing one."""
    write_wigner_binary_raw(w.values, w.hbar, path)


def write_wigner_binary_raw(values: np.ndarray, hbar: float, path) -> None:
    header = _HEADER.pack(_MAGIC, values.shape[0], values.shape[1], hbar)
    body = np.ascontiguousarray(values, dtype="<f8").tobytes()
    ioutil.atomic_write_bytes(path, header + body)


def read_wigner_binary(path):
    """Returns (values, hbar) from a WGR1 file."""
    with open(path, "rb") as handle:
        raw = handle.read()
    magic, n_x, n_p, hbar = _HEADER.unpack_from(raw, 0)
    if magic != _MAGIC:
        raise ValueError(f"bad magic {magic!r}, expected {_MAGIC!r}")
    values = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size).reshape(n_x, n_p)
    return values.copy(), hbar
