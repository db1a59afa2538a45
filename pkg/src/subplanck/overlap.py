"""Displacement operator and the overlap <psi| D(dp, dx) |psi> by three routes.

Phase convention (Weyl / symmetric), fixed once and used by every route:

    (D psi)(x) = exp(i dp (x + dx/2) / hbar) * psi(x + dx)

This is the position representation of exp[i (dp.x_op + dx.p_op) / hbar]
obtained by symmetric operator splitting.  With it, the three routes

    direct:     sum conj(psi) (D psi) dx
    wigner-ft:  sum exp(i (dp x + dx p) / hbar) W(x, p) dx dp
    autocorr:   (2 pi hbar) * sum W(x, p) W(x + dx, p + dp) dx dp
                = |<D>|^2

agree to grid accuracy.  Note the sign: a positive dx translates the wave
function's argument, so the packet center moves by -dx.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import ioutil, spectral
from .errors import CoverageError, NyquistError
from .statekit import WaveFunction1D, check_boundary_decay
from .wigner import WignerGrid


@dataclass(frozen=True, eq=False)
class Displacement:
    """A (dx, dp) displacement in d degrees of freedom."""

    dx: np.ndarray
    dp: np.ndarray

    def __post_init__(self):
        dx = np.atleast_1d(np.asarray(self.dx, dtype=float))
        dp = np.atleast_1d(np.asarray(self.dp, dtype=float))
        if dx.ndim != 1 or dx.shape != dp.shape or dx.size < 1:
            raise ValueError("dx and dp must be 1-D with equal dimension >= 1")
        dx.setflags(write=False)
        dp.setflags(write=False)
        object.__setattr__(self, "dx", dx)
        object.__setattr__(self, "dp", dp)

    @property
    def dim(self) -> int:
        return self.dx.size

    def __neg__(self) -> "Displacement":
        return Displacement(-self.dx, -self.dp)

    def scaled(self, t: float) -> "Displacement":
        return Displacement(t * self.dx, t * self.dp)

    @classmethod
    def zero(cls, dim: int = 1) -> "Displacement":
        return cls(np.zeros(dim), np.zeros(dim))


def displace(psi: WaveFunction1D, d: Displacement) -> WaveFunction1D:
    """Apply D(dp, dx) to a 1-D state with a band-limited shift."""
    if d.dim != 1:
        raise ValueError("grid states support one degree of freedom")
    dx_amt = float(d.dx[0])
    dp_amt = float(d.dp[0])
    shifted = spectral.shift(psi.amplitudes, dx_amt, psi.grid.dx)
    moved = WaveFunction1D(psi.grid, shifted, psi.hbar)
    check_boundary_decay(moved)  # wrapped-around support shows up at the edges
    phase = np.exp(1j * dp_amt * (psi.grid.points + 0.5 * dx_amt) / psi.hbar)
    return WaveFunction1D(psi.grid, shifted * phase, psi.hbar)


def overlap_direct(psi: WaveFunction1D, d: Displacement) -> complex:
    """<psi | D(dp, dx) | psi> as a position-space inner product."""
    moved = displace(psi, d)
    return complex(np.vdot(psi.amplitudes, moved.amplitudes) * psi.grid.dx)


def _nyquist_bounds(w: WignerGrid) -> tuple[float, float]:
    """Largest |dx| and |dp| resolvable in the Fourier sum over the grid."""
    dx_bound = np.pi * w.hbar / w.dp
    dp_bound = np.pi * w.hbar / w.dx
    return dx_bound, dp_bound


def overlap_from_wigner(w: WignerGrid, d: Displacement) -> complex:
    """<D> as the phase-space Fourier transform of W."""
    if d.dim != 1:
        raise ValueError("WignerGrid overlaps support one degree of freedom")
    dx_amt = float(d.dx[0])
    dp_amt = float(d.dp[0])
    dx_bound, dp_bound = _nyquist_bounds(w)
    if abs(dp_amt) > dp_bound * (1 + 1e-12):
        raise NyquistError(f"|dp| = {abs(dp_amt):g} exceeds the x-grid Nyquist bound {dp_bound:g}")
    if abs(dx_amt) > dx_bound * (1 + 1e-12):
        raise NyquistError(f"|dx| = {abs(dx_amt):g} exceeds the p-grid Nyquist bound {dx_bound:g}")
    ex = np.exp(1j * dp_amt * w.x_values / w.hbar)
    ep = np.exp(1j * dx_amt * w.p_values / w.hbar)
    return complex((ex @ (w.values @ ep)) * w.dx * w.dp)


def overlap_sq_autocorr(w: WignerGrid, d: Displacement) -> float:
    """|<D>|^2 as the phase-space autocorrelation of W."""
    if d.dim != 1:
        raise ValueError("WignerGrid overlaps support one degree of freedom")
    dx_amt = float(d.dx[0])
    dp_amt = float(d.dp[0])
    _check_shift_coverage(w, dx_amt, dp_amt)
    shifted = spectral.shift2d(w.values, dx_amt, dp_amt, w.dx, w.dp).real
    value = 2.0 * np.pi * w.hbar * float(np.sum(w.values * shifted)) * w.dx * w.dp
    if value < -1e-9:
        raise RuntimeError(f"autocorrelation {value!r} is negative beyond tolerance")
    return value


def _check_shift_coverage(w: WignerGrid, dx_amt: float, dp_amt: float,
                          required: float = 0.9999) -> None:
    """The shifted product only sees the overlap region of the two grids;
    require that it holds >= 99.99% of the total |W| mass."""
    absw = np.abs(w.values)
    total = float(absw.sum())
    x = w.x_values
    p = w.p_values
    x_hi = x[-1]
    p_hi = p[-1]
    ok_x = (x + dx_amt >= x[0] - 1e-12) & (x + dx_amt <= x_hi + 1e-12)
    ok_p = (p + dp_amt >= p[0] - 1e-12) & (p + dp_amt <= p_hi + 1e-12)
    inside = float(absw[np.ix_(ok_x, ok_p)].sum())
    fraction = inside / total
    if fraction < required:
        raise CoverageError(
            f"shifted overlap covers {fraction:.6f} of the |W| mass, "
            f"below the required {required}"
        )


@dataclass(frozen=True, eq=False)
class OverlapSeries:
    """Complex <D> sampled along a one-parameter ray in displacement space."""

    t: np.ndarray
    values: np.ndarray
    direction: Displacement
    origin: Displacement | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        t = np.array(self.t, dtype=float)
        values = np.array(self.values, dtype=complex)
        if t.ndim != 1 or t.shape != values.shape:
            raise ValueError("t and values must be 1-D arrays of equal length")
        if np.any(t < 0) or np.any(np.diff(t) < 0):
            raise ValueError("t must be non-negative and non-decreasing")
        if np.max(np.abs(values)) > 1.0 + 1e-9:
            raise ValueError("|<D>| exceeds 1 beyond tolerance; route is inconsistent")
        if t.size and t[0] == 0.0 and abs(values[0] - 1.0) > 1e-9:
            raise ValueError(f"value at t = 0 is {values[0]!r}, expected 1 within 1e-9")
        t.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "values", values)
        origin = self.origin if self.origin is not None else Displacement.zero(self.direction.dim)
        object.__setattr__(self, "origin", origin)

    # -- serialization ------------------------------------------------------

    def to_csv(self, path) -> None:
        meta = dict(self.metadata)
        meta.setdefault("format", "overlap-series")
        meta["dir_dx"] = " ".join(repr(v) for v in self.direction.dx.tolist())
        meta["dir_dp"] = " ".join(repr(v) for v in self.direction.dp.tolist())
        rows = [
            f"{t!r},{v.real!r},{v.imag!r},{abs(v)!r}"
            for t, v in zip(self.t.tolist(), self.values.tolist())
        ]
        ioutil.write_table(path, meta, ["t", "re", "im", "abs"], rows)

    @classmethod
    def from_csv(cls, path) -> "OverlapSeries":
        meta, header, rows = ioutil.read_table(path)
        if header != ["t", "re", "im", "abs"]:
            raise ValueError(f"not an overlap-series CSV file: header {header}")
        t = np.array([float(r[0]) for r in rows])
        values = np.array([float(r[1]) + 1j * float(r[2]) for r in rows])
        direction = Displacement(
            [float(v) for v in meta.get("dir_dx", "0").split()],
            [float(v) for v in meta.get("dir_dp", "0").split()],
        )
        return cls(t, values, direction, metadata=meta)

    def to_json_obj(self) -> dict:
        return {
            "metadata": {k: ioutil.format_value(v) for k, v in self.metadata.items()},
            "direction": {"dx": self.direction.dx.tolist(), "dp": self.direction.dp.tolist()},
            "origin": {"dx": self.origin.dx.tolist(), "dp": self.origin.dp.tolist()},
            "t": self.t.tolist(),
            "re": self.values.real.tolist(),
            "im": self.values.imag.tolist(),
        }

    def to_json(self, path) -> None:
        ioutil.write_json(path, self.to_json_obj())

    @classmethod
    def from_json(cls, path) -> "OverlapSeries":
        import json

        with open(path, "rb") as handle:
            obj = json.loads(handle.read().decode("utf-8"))
        direction = Displacement(obj["direction"]["dx"], obj["direction"]["dp"])
        origin = Displacement(obj["origin"]["dx"], obj["origin"]["dp"])
        values = np.array(obj["re"]) + 1j * np.array(obj["im"])
        return cls(np.array(obj["t"]), values, direction, origin, obj.get("metadata", {}))


def overlap_ray(source, direction: Displacement, t_max: float, n: int, *,
                route: str | None = None, hbar: float | None = None,
                P: float | None = None, L: float | None = None,
                metadata: dict | None = None) -> OverlapSeries:
    """Sample <D> along t * direction for t in [0, t_max].

    `source` may be a WaveFunction1D (direct route), a WignerGrid
    ('wigner-ft' by default or 'autocorr'), or a callable mapping a
    Displacement to a complex overlap (analytic oracles, shell ensembles).
    When P and/or L are given, the dx / dp components of `direction` are
    interpreted as dimensionless patterns and rescaled by hbar/P and hbar/L,
    so t reads directly in the natural zero-spacing units.
    """
    if n < 16:
        raise ValueError(f"need at least 16 ray points, got {n}")
    if t_max <= 0:
        raise ValueError("t_max must be positive")

    if hbar is None:
        hbar = getattr(source, "hbar", 1.0)
    dx_dir = direction.dx * (hbar / P if P else 1.0)
    dp_dir = direction.dp * (hbar / L if L else 1.0)
    ray = Displacement(dx_dir, dp_dir)

    if isinstance(source, WaveFunction1D):
        if route not in (None, "direct"):
            raise ValueError(f"route {route!r} needs a WignerGrid source")
        route = "direct"
        evaluate = lambda d: overlap_direct(source, d)
        descriptor = "wavefunction"
    elif isinstance(source, WignerGrid):
        route = route or "wigner-ft"
        if route == "wigner-ft":
            evaluate = lambda d: overlap_from_wigner(source, d)
        elif route == "autocorr":
            evaluate = lambda d: complex(np.sqrt(max(overlap_sq_autocorr(source, d), 0.0)))
        else:
            raise ValueError(f"unknown route {route!r} for a WignerGrid source")
        descriptor = "wigner-grid"
    elif callable(source):
        route = route or "oracle"
        evaluate = source
        descriptor = getattr(source, "__name__", "callable")
    else:
        raise TypeError(f"unsupported overlap source {type(source).__name__}")

    t = np.linspace(0.0, t_max, n)
    values = np.array([complex(evaluate(ray.scaled(ti))) for ti in t])
    meta = {"route": route, "source": descriptor, "hbar": hbar}
    if P is not None:
        meta["P"] = P
    if L is not None:
        meta["L"] = L
    meta.update(metadata or {})
    return OverlapSeries(t, values, ray, metadata=meta)
