"""Quantum state construction: Gaussian packets, superpositions, random waves.

Width convention, used everywhere: a packet is psi ~ exp(-(x-x0)^2/(4 sigma^2)),
so sigma^2 is the position-space variance.  Random-wave fields are real cosine
superpositions with a global amplitude rescale that fixes the ensemble-mean
intensity over the disk to 1/area.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import SupportError

# Relative probability density allowed at a grid edge.  FFT wraparound
# silently corrupts Wigner transforms and spectral shifts for states that
# decay less than this.
BOUNDARY_DECAY = 1e-8


@dataclass(frozen=True)
class Grid1D:
    """Uniform spatial grid with n = 2**k samples on [x_min, x_max).

    The right endpoint is excluded, which makes the grid FFT-compatible.
    """

    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        if self.n < 64 or self.n & (self.n - 1):
            raise ValueError(f"grid size must be a power of two >= 64, got {self.n}")
        if not self.x_max > self.x_min:
            raise ValueError("x_max must exceed x_min")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n

    @property
    def points(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n)


@dataclass(frozen=True, eq=False)
class WaveFunction1D:
    """Complex amplitudes psi(x_i) on a Grid1D, with hbar attached."""

    grid: Grid1D
    amplitudes: np.ndarray
    hbar: float = 1.0

    def __post_init__(self):
        if self.hbar <= 0:
            raise ValueError("hbar must be positive")
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (self.grid.n,):
            raise ValueError(f"amplitudes must have shape ({self.grid.n},)")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def norm(self) -> float:
        """L2 norm: sqrt(sum |psi|^2 dx)."""
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2) * self.grid.dx))

    def normalize(self) -> "WaveFunction1D":
        n = self.norm()
        if n < 1e-12:
            raise ValueError("cannot normalize a zero state")
        return WaveFunction1D(self.grid, self.amplitudes / n, self.hbar)

    def density(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def position_mean(self) -> float:
        w = self.density()
        return float(np.sum(self.grid.points * w) / np.sum(w))

    def position_var(self) -> float:
        w = self.density()
        mu = np.sum(self.grid.points * w) / np.sum(w)
        return float(np.sum((self.grid.points - mu) ** 2 * w) / np.sum(w))

    def momentum_mean(self) -> float:
        """Mean momentum from the FFT momentum representation."""
        spec = np.fft.fft(self.amplitudes)
        w = np.abs(spec) ** 2
        p = 2.0 * np.pi * self.hbar * np.fft.fftfreq(self.grid.n, d=self.grid.dx)
        return float(np.sum(p * w) / np.sum(w))


def check_boundary_decay(psi: WaveFunction1D, threshold: float = BOUNDARY_DECAY) -> None:
    """Raise SupportError unless |psi|^2 at both grid edges is below
    threshold relative to the peak density."""
    dens = psi.density()
    peak = float(dens.max())
    if peak == 0.0:
        raise ValueError("state is identically zero")
    for index, edge in ((0, psi.grid.x_min), (psi.grid.n - 1, psi.grid.x_max - psi.grid.dx)):
        rel = float(dens[index]) / peak
        if rel > threshold:
            amp = abs(psi.amplitudes[index])
            raise SupportError(
                f"boundary amplitude {amp:.3e} at x = {edge:.6g} "
                f"(relative density {rel:.3e}) exceeds the decay requirement {threshold:g}"
            )


def gaussian_packet(grid: Grid1D, x0: float, p0: float, sigma: float,
                    hbar: float = 1.0) -> WaveFunction1D:
    """Normalized Gaussian packet centered at (x0, p0).

    psi(x) ~ exp(-(x-x0)^2 / (4 sigma^2)) * exp(i p0 x / hbar)

    The 6-sigma support must fit inside the grid.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    if x0 - 6.0 * sigma < grid.x_min or x0 + 6.0 * sigma > grid.x_max:
        raise SupportError(
            f"packet support [{x0 - 6 * sigma:.6g}, {x0 + 6 * sigma:.6g}] "
            f"escapes the grid [{grid.x_min:.6g}, {grid.x_max:.6g}]"
        )
    x = grid.points
    amps = np.exp(-((x - x0) ** 2) / (4.0 * sigma ** 2) + 1j * p0 * x / hbar)
    return WaveFunction1D(grid, amps, hbar).normalize()


def superpose(states, coefficients) -> WaveFunction1D:
    """Coefficient-weighted sum of states on a common grid, re-normalized."""
    states = list(states)
    coefficients = [complex(c) for c in coefficients]
    if not states or len(states) != len(coefficients):
        raise ValueError("need one coefficient per state")
    first = states[0]
    for s in states[1:]:
        if s.grid != first.grid or s.hbar != first.hbar:
            raise ValueError("all states must share one grid and one hbar")
    if max(abs(c) for c in coefficients) == 0.0:
        raise ValueError("at least one coefficient must be nonzero")
    total = np.zeros(first.grid.n, dtype=complex)
    for s, c in zip(states, coefficients):
        total += c * s.amplitudes
    out = WaveFunction1D(first.grid, total, first.hbar)
    if out.norm() < 1e-10:
        raise ValueError("superposition cancels to the zero vector")
    return out.normalize()


def cat_state(grid: Grid1D, separation: float, sigma: float, hbar: float = 1.0,
              axis: str = "x") -> WaveFunction1D:
    """Equal-weight superposition of two packets separated by `separation`
    along x (axis='x') or along p (axis='p')."""
    half = 0.5 * separation
    if axis == "x":
        parts = [gaussian_packet(grid, -half, 0.0, sigma, hbar),
                 gaussian_packet(grid, +half, 0.0, sigma, hbar)]
    elif axis == "p":
        parts = [gaussian_packet(grid, 0.0, -half, sigma, hbar),
                 gaussian_packet(grid, 0.0, +half, sigma, hbar)]
    else:
        raise ValueError("axis must be 'x' or 'p'")
    return superpose(parts, [1.0, 1.0])


def compass_state(grid: Grid1D, separation: float, sigma: float,
                  hbar: float = 1.0) -> WaveFunction1D:
    """Four-packet compass state: packets at x = +-sep/2 and at p = +-sep/2."""
    half = 0.5 * separation
    parts = [gaussian_packet(grid, -half, 0.0, sigma, hbar),
             gaussian_packet(grid, +half, 0.0, sigma, hbar),
             gaussian_packet(grid, 0.0, -half, sigma, hbar),
             gaussian_packet(grid, 0.0, +half, sigma, hbar)]
    return superpose(parts, [1.0, 1.0, 1.0, 1.0])


@dataclass(frozen=True, eq=False)
class RandomWaveState:
    """Gaussian-random superposition of M plane waves of fixed wavenumber k.

    The field is real,  psi(x) = sum_j a_j cos(k d_j . x + phi_j),  with unit
    directions d_j uniform on the circle, phases uniform on [0, 2pi), and
    amplitudes i.i.d. normal rescaled so sum a_j^2 / 2 = 1 / (pi R^2), i.e.
    the ensemble-mean intensity over the disk of radius R is 1/area.
    """

    k: float
    directions: np.ndarray
    phases: np.ndarray
    amplitudes: np.ndarray
    region_radius: float
    seed: object = field(repr=False, default=None)

    def __post_init__(self):
        for name in ("directions", "phases", "amplitudes"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        m = self.phases.size
        if self.directions.shape != (m, 2) or self.amplitudes.shape != (m,):
            raise ValueError("component arrays have inconsistent shapes")


# Dense tables of the disk-average kernel 2 J1(xi)/xi, cached per argument
# range; pair sums over an ensemble reuse one table.  360 samples per unit
# of xi keeps the linear-interpolation error below 1e-6.
_DISK_KERNEL_TABLES: dict = {}


def _disk_kernel(xi: np.ndarray, xi_max: float) -> np.ndarray:
    from .bessel import scaled_bessel

    key = round(float(xi_max), 9)
    table = _DISK_KERNEL_TABLES.get(key)
    if table is None:
        grid = np.linspace(0.0, xi_max, int(xi_max * 360) + 1024)
        table = (grid, scaled_bessel(1.0, grid))
        _DISK_KERNEL_TABLES[key] = table
    return np.interp(xi, table[0], table[1])


def _disk_mean_intensity(k, directions, phases, amplitudes, radius) -> float:
    """Exact disk average of psi^2 for a cosine superposition.

    Uses the closed-form disk average of a plane wave,
    mean_disk exp(i q . x) = 2 J1(|q| R) / (|q| R), summed over component
    pairs (the kernel itself comes from an interpolation table accurate to
    ~1e-6, far below the statistical scales this normalizes).
    """
    xi_max = 2.0 * k * radius
    i, j = np.triu_indices(phases.size, k=1)
    dot = np.einsum("ij,ij->i", directions[i], directions[j])
    diff = k * radius * np.sqrt(np.maximum(2.0 - 2.0 * dot, 0.0))
    summ = k * radius * np.sqrt(np.maximum(2.0 + 2.0 * dot, 0.0))
    cross = amplitudes[i] * amplitudes[j] * (
        np.cos(phases[i] - phases[j]) * _disk_kernel(diff, xi_max)
        + np.cos(phases[i] + phases[j]) * _disk_kernel(summ, xi_max)
    )
    lam_two = _disk_kernel(np.array([xi_max]), xi_max)[0]
    diag = 0.5 * np.sum(amplitudes ** 2 * (1.0 + np.cos(2.0 * phases) * lam_two))
    return float(diag + np.sum(cross))


def random_wave_state(k: float, m: int, region_radius: float, seed) -> RandomWaveState:
    """Draw a RandomWaveState; bit-reproducible for a given seed.

    Draw order (PCG64): direction angles, phases, raw amplitudes.  The global
    rescale uses the exact disk average of the raw field's intensity, so the
    realized (not just ensemble) mean intensity over the region is 1/area.
    """
    if m < 2:
        raise ValueError(f"need at least 2 components, got {m}")
    if k <= 0 or region_radius <= 0:
        raise ValueError("k and region_radius must be positive")
    rng = np.random.default_rng(seed)
    angles = rng.uniform(0.0, 2.0 * np.pi, m)
    phases = rng.uniform(0.0, 2.0 * np.pi, m)
    raw = rng.standard_normal(m)
    directions = np.column_stack([np.cos(angles), np.sin(angles)])
    area = np.pi * region_radius ** 2
    mean_intensity = _disk_mean_intensity(k, directions, phases, raw, region_radius)
    scale = np.sqrt(1.0 / (area * mean_intensity))
    return RandomWaveState(k, directions, phases, scale * raw, region_radius, seed)


def evaluate_random_wave(state: RandomWaveState, points) -> np.ndarray:
    """Field values psi(x) = sum_j a_j cos(k d_j . x + phi_j) at 2-D points."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] != 2:
        raise ValueError("points must have shape (n, 2)")
    out = np.empty(pts.shape[0])
    chunk = 16384
    for lo in range(0, pts.shape[0], chunk):
        block = pts[lo:lo + chunk]
        phase = state.k * (block @ state.directions.T) + state.phases[None, :]
        out[lo:lo + chunk] = np.cos(phase) @ state.amplitudes
    return out


def autocorrelation(state: RandomWaveState, separations, n_probe: int, seed) -> np.ndarray:
    """Normalized two-point correlation estimate per separation.

    Probe points are uniform in the disk shrunk by the largest separation so
    every probe pair stays inside the region; the same probes serve all
    separations, which makes the value at zero separation exactly 1.
    """
    seps = np.atleast_1d(np.asarray(separations, dtype=float))
    if np.any(seps < 0):
        raise ValueError("separations must be non-negative")
    max_sep = float(seps.max()) if seps.size else 0.0
    if max_sep > state.region_radius:
        raise ValueError(
            f"separation {max_sep:g} exceeds the region radius {state.region_radius:g}"
        )
    if n_probe < 1:
        raise ValueError("need at least one probe point")
    probe_radius = state.region_radius - max_sep
    rng = np.random.default_rng(seed)
    radii = probe_radius * np.sqrt(rng.random(n_probe))
    angles = rng.uniform(0.0, 2.0 * np.pi, n_probe)
    probes = np.column_stack([radii * np.cos(angles), radii * np.sin(angles)])
    dir_angles = rng.uniform(0.0, 2.0 * np.pi, (seps.size, n_probe))

    base = evaluate_random_wave(state, probes)
    denom = np.mean(base ** 2)
    out = np.empty(seps.size)
    for i, sep in enumerate(seps):
        u = np.column_stack([np.cos(dir_angles[i]), np.sin(dir_angles[i])])
        partner = evaluate_random_wave(state, probes + sep * u)
        out[i] = np.mean(base * partner) / denom
    return out
