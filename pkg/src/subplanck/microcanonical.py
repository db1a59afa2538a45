"""Microcanonical shell averages: samplers, Monte Carlo estimator, oracles.

The constant-energy shell stands in for the Wigner function of a chaotic
eigenstate.  For the circular billiard the shell average of the displacement
phase factorizes into

    <D> = J0(P |dx| / hbar) * 2 J1(L |dp| / hbar) / (L |dp| / hbar)
        = Lambda_0(P |dx| / hbar) * Lambda_1(L |dp| / hbar),

and for N hard spheres in a box (excluded volume ignored, dilute-gas
approximation) into

    <D> = Lambda_nu(sqrt(N) P |dx| / hbar) * prod_i sinc(L dp_i / 2 hbar),
    nu = (3N - 2) / 2,

with the large-N Gaussian limit exp(-P^2 |dx|^2 / 6 hbar^2) *
exp(-L^2 |dp|^2 / 24 hbar^2).  The kernel normalization Lambda_nu(0) = 1
keeps <D(0,0)> = 1, consistent with unitarity and with the Gaussian limit.
The box is centered at the origin so the per-coordinate position average is
the real sinc; factorials at half-odd orders mean Gamma(nu + 1) throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import ioutil
from .bessel import scaled_bessel
from .overlap import Displacement, OverlapSeries

MC_PARTICLE_LIMIT = 100


@dataclass(frozen=True)
class DiskBilliard:
    """Circular billiard of radius L with momentum magnitude P on the shell."""

    radius: float
    momentum: float
    hbar: float = 1.0

    def __post_init__(self):
        if min(self.radius, self.momentum, self.hbar) <= 0:
            raise ValueError("radius, momentum, and hbar must be positive")


@dataclass(frozen=True)
class GasBox:
    """N hard spheres in a box of side L; E = N P^2 / 2m, so P is the typical
    single-particle momentum.  The shell lives in 3N dimensions."""

    n_particles: int
    side: float
    momentum: float
    hbar: float = 1.0

    def __post_init__(self):
        if self.n_particles < 1:
            raise ValueError("need at least one particle")
        if min(self.side, self.momentum, self.hbar) <= 0:
            raise ValueError("side, momentum, and hbar must be positive")

    @property
    def dim(self) -> int:
        return 3 * self.n_particles

    @property
    def nu(self) -> float:
        return (3 * self.n_particles - 2) / 2.0


@dataclass(frozen=True, eq=False)
class ShellSamples:
    """Phase-space sample batch from a shell sampler."""

    positions: np.ndarray
    momenta: np.ndarray
    hbar: float
    seed: object = field(repr=False, default=None)

    def __post_init__(self):
        for name in ("positions", "momenta"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.positions.shape != self.momenta.shape or self.positions.ndim != 2:
            raise ValueError("positions and momenta must be (n, d) arrays of equal shape")

    @property
    def dim(self) -> int:
        return self.positions.shape[1]


@dataclass(frozen=True)
class McEstimate:
    """Monte Carlo mean of the displacement phase with its standard error."""

    mean: complex
    stderr: float
    n_samples: int
    seed: object = field(repr=False, default=None)

    def __post_init__(self):
        if self.stderr < 0:
            raise ValueError("standard error cannot be negative")


def sample_disk_shell(geom: DiskBilliard, seed, n: int) -> ShellSamples:
    """n points with x uniform over the disk and p uniform on |p| = P.

    Draw order (PCG64): radius uniforms, position angles, momentum angles.
    """
    if n < 1:
        raise ValueError("need at least one sample")
    rng = np.random.default_rng(seed)
    radii = geom.radius * np.sqrt(rng.random(n))
    pos_ang = rng.uniform(0.0, 2.0 * np.pi, n)
    mom_ang = rng.uniform(0.0, 2.0 * np.pi, n)
    x = np.column_stack([radii * np.cos(pos_ang), radii * np.sin(pos_ang)])
    p = geom.momentum * np.column_stack([np.cos(mom_ang), np.sin(mom_ang)])
    return ShellSamples(x, p, geom.hbar, seed)


def sample_box_shell(gas: GasBox, seed, n: int) -> ShellSamples:
    """n points with x uniform over [-L/2, L/2]^(3N) and p uniform on the
    sphere of radius sqrt(N) P in 3N dimensions.

    Excluded volume is ignored (dilute-gas approximation).  Beyond N = 100
    the Monte Carlo cross-check regime ends; use the analytic oracle.
    """
    if n < 1:
        raise ValueError("need at least one sample")
    if gas.n_particles > MC_PARTICLE_LIMIT:
        raise ValueError(
            f"N = {gas.n_particles} exceeds the Monte Carlo limit {MC_PARTICLE_LIMIT}; "
            "use gas_overlap_analytic instead"
        )
    rng = np.random.default_rng(seed)
    dim = gas.dim
    x = rng.uniform(-0.5 * gas.side, 0.5 * gas.side, (n, dim))
    z = rng.standard_normal((n, dim))
    radius = np.sqrt(gas.n_particles) * gas.momentum
    p = z * (radius / np.linalg.norm(z, axis=1))[:, None]
    return ShellSamples(x, p, gas.hbar, seed)


def mc_overlap(samples: ShellSamples, d: Displacement) -> McEstimate:
    """Shell-average of exp(i (dp.x + dx.p) / hbar) over the sample batch."""
    if d.dim != samples.dim:
        raise ValueError(f"displacement dimension {d.dim} != sample dimension {samples.dim}")
    phases = (samples.positions @ d.dp + samples.momenta @ d.dx) / samples.hbar
    values = np.exp(1j * phases)
    n = values.size
    mean = complex(values.mean())
    if n > 1:
        var = values.real.var(ddof=1) + values.imag.var(ddof=1)
        stderr = float(np.sqrt(var / n))
    else:
        stderr = 0.0
    return McEstimate(mean, stderr, n, samples.seed)


def disk_overlap_analytic(geom: DiskBilliard, dx_mag, dp_mag):
    """Closed-form shell average for the disk; factorizes exactly."""
    dx_mag = np.asarray(dx_mag, dtype=float)
    dp_mag = np.asarray(dp_mag, dtype=float)
    if np.any(dx_mag < 0) or np.any(dp_mag < 0):
        raise ValueError("displacement magnitudes must be non-negative")
    out = (scaled_bessel(0.0, geom.momentum * dx_mag / geom.hbar)
           * scaled_bessel(1.0, geom.radius * dp_mag / geom.hbar))
    return out if isinstance(out, np.ndarray) else float(out)


def gas_overlap_analytic(gas: GasBox, dx_mag: float, dp) -> float:
    """Closed-form shell average for the gas.

    dx_mag is the Euclidean magnitude of the 3N-dimensional position
    displacement (the momentum shell is isotropic, so only the magnitude
    enters); dp must give all 3N momentum components.
    """
    if dx_mag < 0:
        raise ValueError("dx_mag must be non-negative")
    dp = np.asarray(dp, dtype=float)
    if dp.shape != (gas.dim,):
        raise ValueError(f"dp must have {gas.dim} components, got shape {dp.shape}")
    xi = np.sqrt(gas.n_particles) * gas.momentum * dx_mag / gas.hbar
    u = gas.side * dp / (2.0 * gas.hbar)
    return float(scaled_bessel(gas.nu, xi) * np.prod(np.sinc(u / np.pi)))


def gas_overlap_gaussian(gas: GasBox, dx_mag, dp_mag):
    """Large-N Gaussian limit of the gas overlap."""
    dx_mag = np.asarray(dx_mag, dtype=float)
    dp_mag = np.asarray(dp_mag, dtype=float)
    if np.any(dx_mag < 0) or np.any(dp_mag < 0):
        raise ValueError("displacement magnitudes must be non-negative")
    a = gas.momentum * dx_mag / gas.hbar
    b = gas.side * dp_mag / gas.hbar
    out = np.exp(-a * a / 6.0) * np.exp(-b * b / 24.0)
    return out if isinstance(out, np.ndarray) else float(out)


# ---------------------------------------------------------------------------
# ray builders (t in units of hbar/P for dx rays and hbar/L for dp rays)

def disk_series(geom: DiskBilliard, component: str, t_max: float, n: int) -> OverlapSeries:
    """Analytic overlap along a pure dx or dp ray for the disk."""
    t = np.linspace(0.0, t_max, n)
    if component == "dx":
        values = scaled_bessel(0.0, t)
        direction = Displacement([geom.hbar / geom.momentum, 0.0], [0.0, 0.0])
    elif component == "dp":
        values = scaled_bessel(1.0, t)
        direction = Displacement([0.0, 0.0], [geom.hbar / geom.radius, 0.0])
    else:
        raise ValueError("component must be 'dx' or 'dp'")
    meta = {"source": "disk-analytic", "component": component, "route": "oracle",
            "hbar": geom.hbar, "P": geom.momentum, "L": geom.radius}
    return OverlapSeries(t, values.astype(complex), direction, metadata=meta)


def gas_series(gas: GasBox, component: str, t_max: float, n: int) -> OverlapSeries:
    """Analytic overlap along a pure dx ray (t = P|dx|/hbar) or along an
    equal-component dp ray (t = L|dp|/hbar) for the gas."""
    t = np.linspace(0.0, t_max, n)
    dim = gas.dim
    if component == "dx":
        values = scaled_bessel(gas.nu, np.sqrt(gas.n_particles) * t)
        unit = np.zeros(dim)
        unit[0] = 1.0
        direction = Displacement(unit * gas.hbar / gas.momentum, np.zeros(dim))
    elif component == "dp":
        u = t / (2.0 * np.sqrt(dim))
        values = np.sinc(u / np.pi) ** dim
        pattern = np.full(dim, 1.0 / np.sqrt(dim))
        direction = Displacement(np.zeros(dim), pattern * gas.hbar / gas.side)
    else:
        raise ValueError("component must be 'dx' or 'dp'")
    meta = {"source": "gas-analytic", "component": component, "route": "oracle",
            "n_particles": gas.n_particles, "hbar": gas.hbar,
            "P": gas.momentum, "L": gas.side}
    return OverlapSeries(t, values.astype(complex), direction, metadata=meta)


@dataclass(frozen=True, eq=False)
class McSweep:
    """Monte Carlo shell overlaps along a displacement ray."""

    t: np.ndarray
    values: np.ndarray
    stderrs: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        t = np.array(self.t, dtype=float)
        values = np.array(self.values, dtype=complex)
        stderrs = np.array(self.stderrs, dtype=float)
        if not (t.shape == values.shape == stderrs.shape) or t.ndim != 1:
            raise ValueError("t, values, stderrs must be 1-D arrays of equal length")
        for arr in (t, values, stderrs):
            arr.setflags(write=False)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "stderrs", stderrs)

    def to_csv(self, path) -> None:
        meta = dict(self.metadata)
        meta.setdefault("format", "mc-sweep")
        rows = [
            f"{t!r},{v.real!r},{v.imag!r},{s!r}"
            for t, v, s in zip(self.t.tolist(), self.values.tolist(), self.stderrs.tolist())
        ]
        ioutil.write_table(path, meta, ["t", "mean_re", "mean_im", "stderr"], rows)

    @classmethod
    def from_csv(cls, path) -> "McSweep":
        meta, header, rows = ioutil.read_table(path)
        if header != ["t", "mean_re", "mean_im", "stderr"]:
            raise ValueError(f"not an mc-sweep CSV file: header {header}")
        t = np.array([float(r[0]) for r in rows])
        values = np.array([float(r[1]) + 1j * float(r[2]) for r in rows])
        stderrs = np.array([float(r[3]) for r in rows])
        return cls(t, values, stderrs, meta)

    def to_json(self, path) -> None:
        obj = {
            "metadata": {k: ioutil.format_value(v) for k, v in self.metadata.items()},
            "t": self.t.tolist(),
            "mean_re": self.values.real.tolist(),
            "mean_im": self.values.imag.tolist(),
            "stderr": self.stderrs.tolist(),
        }
        ioutil.write_json(path, obj)


def mc_sweep(geometry, component: str, t_max: float, n_points: int,
             n_samples: int, seed) -> McSweep:
    """Monte Carlo overlap along a pure dx or dp ray.

    Each ray point draws a fresh independent sample batch from a child of
    SeedSequence(seed), so the whole sweep is reproducible and the points
    are statistically independent.
    """
    if n_samples < 1:
        raise ValueError("need at least one sample per point")
    if n_points < 2:
        raise ValueError("need at least two ray points")
    t = np.linspace(0.0, t_max, n_points)

    if isinstance(geometry, DiskBilliard):
        dim = 2
        sampler = lambda child: sample_disk_shell(geometry, child, n_samples)
        dx_scale = geometry.hbar / geometry.momentum
        dp_scale = geometry.hbar / geometry.radius
        meta = {"geometry": "disk", "L": geometry.radius, "P": geometry.momentum,
                "hbar": geometry.hbar}
    elif isinstance(geometry, GasBox):
        dim = geometry.dim
        sampler = lambda child: sample_box_shell(geometry, child, n_samples)
        dx_scale = geometry.hbar / geometry.momentum
        dp_scale = geometry.hbar / geometry.side
        meta = {"geometry": "gas", "n_particles": geometry.n_particles,
                "L": geometry.side, "P": geometry.momentum, "hbar": geometry.hbar}
    else:
        raise TypeError(f"unsupported geometry {type(geometry).__name__}")

    if component == "dx":
        unit = np.zeros(dim)
        unit[0] = 1.0
        direction = Displacement(unit * dx_scale, np.zeros(dim))
    elif component == "dp":
        pattern = np.full(dim, 1.0 / np.sqrt(dim)) if dim > 2 else np.array([1.0, 0.0])
        if dim == 2:
            direction = Displacement(np.zeros(dim), pattern * dp_scale)
        else:
            direction = Displacement(np.zeros(dim), pattern * dp_scale)
    else:
        raise ValueError("component must be 'dx' or 'dp'")

    children = np.random.SeedSequence(seed).spawn(n_points)
    values = np.empty(n_points, dtype=complex)
    stderrs = np.empty(n_points)
    for i, ti in enumerate(t):
        batch = sampler(children[i])
        est = mc_overlap(batch, direction.scaled(ti))
        values[i] = est.mean
        stderrs[i] = est.stderr
    meta.update(component=component, samples=n_samples, seed=seed, points=n_points,
                t_max=t_max, format="mc-sweep")
    return McSweep(t, values, stderrs, meta)
