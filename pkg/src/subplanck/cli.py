"""Command-line front end: every study as a subcommand with reproducible
seeds and CSV/JSON outputs.

Exit codes: 0 success, 2 usage/validation, 3 analysis not applicable,
4 numerical-domain violation.  All physical inputs are in natural units with
hbar, P, L explicit flags (defaults 1).  Stochastic outputs embed their seed
and sample count; every output embeds the units and a build identifier, and
files are written atomically.  SUBPLANCK_THREADS (0 = auto) caps worker
parallelism; the current implementation computes in-process with vectorized
kernels, so the cap is validated and never exceeded.
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys

import numpy as np

from . import __version__, ioutil
from .analysis import gaussian_convergence, ringing_report, variance_scaling
from .errors import DomainError, RingingError
from .microcanonical import DiskBilliard, GasBox, disk_series, gas_series, mc_sweep
from .overlap import (Displacement, OverlapSeries, overlap_direct,
                      overlap_from_wigner, overlap_sq_autocorr)
from .statekit import Grid1D, cat_state, compass_state, gaussian_packet
from .wigner import (fringe_wavelength, marginal_x, normalization, purity,
                     wigner_transform, write_wigner_binary, write_wigner_csv)

_EXIT_OK = 0
_EXIT_USAGE = 2
_EXIT_NOT_APPLICABLE = 3
_EXIT_DOMAIN = 4


def build_id() -> str:
    """git-describe-style identifier when available, else the version."""
    here = os.path.dirname(os.path.abspath(__file__))
    try:
        described = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            cwd=here, capture_output=True, text=True, timeout=5,
        )
        if described.returncode == 0 and described.stdout.strip():
            return f"subplanck-{__version__}+g{described.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return f"subplanck-{__version__}"


def effective_workers() -> int:
    """Worker cap from SUBPLANCK_THREADS; 0 or unset means auto."""
    raw = os.environ.get("SUBPLANCK_THREADS", "0")
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"SUBPLANCK_THREADS must be an integer, got {raw!r}")
    if value < 0:
        raise ValueError("SUBPLANCK_THREADS must be non-negative")
    return value if value > 0 else (os.cpu_count() or 1)


def _float_list(text: str):
    try:
        return [float(v) for v in text.split(",") if v != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed list {text!r}")


def _int_list(text: str):
    try:
        return [int(v) for v in text.split(",") if v != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed list {text!r}")


def _window(text: str):
    parts = _float_list(text)
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("window must be x_lo,x_hi,p_lo,p_hi")
    return tuple(parts)


# ---------------------------------------------------------------------------
# shared builders

def _add_state_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--state", choices=["gaussian", "cat2", "cat4"], required=True,
                   help="state family")
    p.add_argument("--sigma", type=float, default=1.0, help="packet width")
    p.add_argument("--sep", type=float, default=8.0,
                   help="packet separation for cat2/cat4")
    p.add_argument("--x0", type=float, default=0.0, help="gaussian center")
    p.add_argument("--p0", type=float, default=0.0, help="gaussian momentum")
    p.add_argument("--grid", type=int, default=512, help="grid points (power of two)")
    p.add_argument("--xmax", type=float, default=16.0, help="grid spans [-xmax, xmax)")
    p.add_argument("--hbar", type=float, default=1.0)


def _build_state(args):
    try:
        grid = Grid1D(-args.xmax, args.xmax, args.grid)
    except ValueError as exc:
        raise ValueError(f"--grid/--xmax: {exc}")
    if args.sigma <= 0:
        raise ValueError("--sigma must be positive")
    if args.state == "gaussian":
        return gaussian_packet(grid, args.x0, args.p0, args.sigma, args.hbar)
    if args.state == "cat2":
        return cat_state(grid, args.sep, args.sigma, args.hbar)
    return compass_state(grid, args.sep, args.sigma, args.hbar)


def _add_ray_flags(p: argparse.ArgumentParser) -> None:
    kind = p.add_mutually_exclusive_group(required=True)
    kind.add_argument("--dx-ray", action="store_true", help="pure position ray")
    kind.add_argument("--dp-ray", action="store_true", help="pure momentum ray")
    kind.add_argument("--ray", type=_float_list, default=None,
                      help="mixed ray direction DX,DP")
    p.add_argument("--tmax", type=float, required=True, help="ray extent")
    p.add_argument("--points", type=int, default=128, help="samples along the ray")


def _ray_direction_1d(args) -> Displacement:
    if args.dx_ray:
        return Displacement([1.0], [0.0])
    if args.dp_ray:
        return Displacement([0.0], [1.0])
    if len(args.ray) != 2:
        raise ValueError("--ray needs exactly DX,DP")
    if args.ray == [0.0, 0.0]:
        raise ValueError("--ray must be nonzero")
    return Displacement([args.ray[0]], [args.ray[1]])


def _base_metadata(args, **extra) -> dict:
    meta = {"build": build_id(), "hbar": getattr(args, "hbar", 1.0)}
    meta.update(extra)
    return meta


# ---------------------------------------------------------------------------
# subcommands

def _cmd_wigner(args) -> int:
    psi = _build_state(args)
    w = wigner_transform(psi)
    meta = _base_metadata(args, state=args.state, sigma=args.sigma)
    if args.state in ("cat2", "cat4"):
        meta["sep"] = args.sep
    if args.format == "csv":
        write_wigner_csv(w, args.out, meta)
    else:
        write_wigner_binary(w, args.out)
    marg = marginal_x(w)
    summary = {
        "build": build_id(),
        "hbar": args.hbar,
        "state": args.state,
        "normalization": normalization(w),
        "purity": purity(w),
        "w_min": float(w.values.min()),
        "w_max": float(w.values.max()),
        "marginal_total": float(marg.sum() * w.dx),
        "out": str(args.out),
    }
    if args.fringe_axis is not None:
        if args.fringe_window is None:
            raise ValueError("--fringe-axis requires --fringe-window")
        summary["fringe"] = {
            "axis": args.fringe_axis,
            "window": list(args.fringe_window),
            "period": fringe_wavelength(w, args.fringe_axis, args.fringe_window),
        }
    sys.stdout.write(ioutil.dump_json(summary))
    return _EXIT_OK


def _cmd_overlap(args) -> int:
    psi = _build_state(args)
    direction = _ray_direction_1d(args)
    if args.tmax <= 0:
        raise ValueError("--tmax must be positive")
    if args.points < 16:
        raise ValueError("--points must be at least 16")
    routes = ["direct", "wigner-ft", "autocorr"] if args.route == "all" else [args.route]
    t = np.linspace(0.0, args.tmax, args.points)

    w = None
    if any(r in ("wigner-ft", "autocorr") for r in routes):
        w = wigner_transform(psi)
        # preflight so an out-of-range ray fails with a clear bound and exit 2
        reach_dp = args.tmax * abs(float(direction.dp[0]))
        reach_dx = args.tmax * abs(float(direction.dx[0]))
        dp_bound = np.pi * w.hbar / w.dx
        dx_bound = np.pi * w.hbar / w.dp
        if reach_dp > dp_bound:
            raise ValueError(
                f"ray reaches |dp| = {reach_dp:g}, beyond the Nyquist bound {dp_bound:g}"
            )
        if reach_dx > dx_bound:
            raise ValueError(
                f"ray reaches |dx| = {reach_dx:g}, beyond the Nyquist bound {dx_bound:g}"
            )

    columns: dict[str, np.ndarray] = {}
    for route in routes:
        if route == "direct":
            vals = np.array([overlap_direct(psi, direction.scaled(ti)) for ti in t])
            columns["direct"] = vals
        elif route == "wigner-ft":
            vals = np.array([overlap_from_wigner(w, direction.scaled(ti)) for ti in t])
            columns["wigner_ft"] = vals
        else:
            sq = np.array([overlap_sq_autocorr(w, direction.scaled(ti)) for ti in t])
            columns["autocorr"] = np.sqrt(np.clip(sq, 0.0, None)).astype(complex)

    meta = _base_metadata(
        args, state=args.state, route=args.route, tmax=args.tmax,
        points=args.points, dir_dx=float(direction.dx[0]), dir_dp=float(direction.dp[0]),
    )
    tl = t.tolist()
    if args.route == "all":
        mags = np.column_stack([np.abs(columns[k]) for k in ("direct", "wigner_ft", "autocorr")])
        max_dev = mags.max(axis=1) - mags.min(axis=1)
        header = ["t", "re_direct", "im_direct", "abs_direct",
                  "re_wigner_ft", "im_wigner_ft", "abs_wigner_ft",
                  "abs_autocorr", "max_dev"]
        d = columns["direct"].tolist()
        g = columns["wigner_ft"].tolist()
        a = np.abs(columns["autocorr"]).tolist()
        rows = [
            f"{tl[i]!r},{d[i].real!r},{d[i].imag!r},{abs(d[i])!r},"
            f"{g[i].real!r},{g[i].imag!r},{abs(g[i])!r},{a[i]!r},{max_dev[i]!r}"
            for i in range(len(tl))
        ]
        ioutil.write_table(args.out, meta, header, rows)
        summary = {"max_pairwise_deviation": float(max_dev.max()), "out": str(args.out)}
    else:
        key = next(iter(columns))
        vals = columns[key].tolist()
        rows = [
            f"{tl[i]!r},{vals[i].real!r},{vals[i].imag!r},{abs(vals[i])!r}"
            for i in range(len(tl))
        ]
        ioutil.write_table(args.out, meta, ["t", "re", "im", "abs"], rows)
        summary = {"route": args.route, "out": str(args.out)}
    sys.stdout.write(ioutil.dump_json(summary))
    return _EXIT_OK


def _build_geometry(args):
    if args.geom == "disk":
        return DiskBilliard(args.L, args.P, args.hbar)
    return GasBox(args.N, args.L, args.P, args.hbar)


def _cmd_mc(args) -> int:
    if args.samples < 1:
        raise ValueError("--samples must be positive")
    geometry = _build_geometry(args)
    if isinstance(geometry, GasBox) and geometry.n_particles > 100:
        raise ValueError("gas N > 100: use `subplanck oracle --formula eq12` instead")
    component = "dx" if args.dx_ray else "dp"
    if args.ray is not None:
        raise ValueError("mc supports only --dx-ray or --dp-ray")
    sweep = mc_sweep(geometry, component, args.tmax, args.points, args.samples, args.seed)
    sweep.metadata["build"] = build_id()
    sweep.to_csv(args.out)
    sys.stdout.write(ioutil.dump_json(
        {"geometry": args.geom, "samples": args.samples, "seed": args.seed,
         "points": args.points, "out": str(args.out)}
    ))
    return _EXIT_OK


def _oracle_series(formula: str, args) -> OverlapSeries:
    component = "dx" if args.dx_ray else "dp"
    if args.ray is not None:
        raise ValueError("oracle rays are --dx-ray or --dp-ray")
    if formula == "eq7":
        return disk_series(DiskBilliard(args.L, args.P, args.hbar),
                           component, args.tmax, args.points)
    if formula == "eq12":
        gas = GasBox(args.N, args.L, args.P, args.hbar)
        if gas.nu > 2000:
            raise DomainError(
                f"N = {gas.n_particles} gives order nu = {gas.nu:g}, beyond the "
                "stable-evaluation domain nu <= 2000 (N <= 1334)"
            )
        return gas_series(gas, component, args.tmax, args.points)
    # eq13: Gaussian limit factors in the same t units
    t = np.linspace(0.0, args.tmax, args.points)
    if component == "dx":
        values = np.exp(-t * t / 6.0)
        direction = Displacement([args.hbar / args.P], [0.0])
    else:
        values = np.exp(-t * t / 24.0)
        direction = Displacement([0.0], [args.hbar / args.L])
    meta = {"source": "gaussian-limit", "component": component, "route": "oracle",
            "hbar": args.hbar, "P": args.P, "L": args.L}
    return OverlapSeries(t, values.astype(complex), direction, metadata=meta)


def _cmd_oracle(args) -> int:
    series = _oracle_series(args.formula, args)
    meta = dict(series.metadata)
    meta.update(build=build_id(), formula=args.formula, tmax=args.tmax,
                points=args.points, format="oracle-sweep")
    if args.formula == "eq12":
        meta["n_particles"] = args.N
    tl = series.t.tolist()
    vals = series.values.real.tolist()
    rows = [f"{tl[i]!r},{vals[i]!r}" for i in range(len(tl))]
    ioutil.write_table(args.out, meta, ["t", "value"], rows)
    sys.stdout.write(ioutil.dump_json({"formula": args.formula, "out": str(args.out)}))
    return _EXIT_OK


def _cmd_ring(args) -> int:
    if args.series is not None:
        path = str(args.series)
        if path.endswith(".json"):
            series = OverlapSeries.from_json(path)
        else:
            series = OverlapSeries.from_csv(path)
    else:
        if args.oracle is None:
            raise ValueError("provide --series FILE or --oracle FORMULA")
        series = _oracle_series(args.oracle, args)
    report = ringing_report(series, skip=args.skip_peaks)
    report.metadata["build"] = build_id()
    if args.out:
        report.to_json(args.out)
        sys.stdout.write(ioutil.dump_json(
            {"exponent": report.exponent, "zeros": int(report.zeros.size),
             "out": str(args.out)}
        ))
    else:
        sys.stdout.write(ioutil.dump_json(report.to_json_obj()))
    return _EXIT_OK


def _cmd_study(args) -> int:
    if args.study == "gaussian-convergence":
        if not args.N:
            raise ValueError("--N list required for gaussian-convergence")
        t = np.linspace(0.0, args.tmax, args.points)
        rows = gaussian_convergence(args.N, t)
        meta = _base_metadata(args, study=args.study, tmax=args.tmax, points=args.points)
        lines = [
            f"{r.n_particles},{r.dx_deviation!r},{r.dp_deviation!r}" for r in rows
        ]
        ioutil.write_table(args.out, meta, ["N", "dx_deviation", "dp_deviation"], lines)
        dx = [r.dx_deviation for r in rows]
        dp = [r.dp_deviation for r in rows]
        summary = {
            "study": args.study,
            "dx_strictly_decreasing": _monotone_flag(dx),
            "dp_strictly_decreasing": _monotone_flag(dp),
            "out": str(args.out),
        }
    else:
        if not args.k:
            raise ValueError("--k list required for variance-scaling")
        rows = variance_scaling(args.k, args.ensemble, args.cell,
                                region_radius=args.radius, base_seed=args.seed)
        meta = _base_metadata(args, study=args.study, ensemble=args.ensemble,
                              cell=args.cell, radius=args.radius, seed=args.seed)
        lines = [f"{r.k!r},{r.fluctuation!r}" for r in rows]
        ioutil.write_table(args.out, meta, ["k", "fluctuation"], lines)
        f = [r.fluctuation for r in rows]
        summary = {
            "study": args.study,
            "strictly_decreasing": _monotone_flag(f),
            "seed": args.seed,
            "out": str(args.out),
        }
    sys.stdout.write(ioutil.dump_json(summary))
    return _EXIT_OK


def _monotone_flag(values):
    if len(values) < 2:
        return "n/a"
    return all(b < a for a, b in zip(values, values[1:]))


# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="subplanck",
        description="Phase-space numerics: Wigner grids, displacement overlaps, "
                    "shell averages, ringing analysis.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("wigner", help="Wigner grid of a constructed state")
    _add_state_flags(p)
    p.add_argument("--out", required=True, help="output file")
    p.add_argument("--format", choices=["csv", "bin"], default="csv")
    p.add_argument("--fringe-axis", choices=["x", "p"], default=None)
    p.add_argument("--fringe-window", type=_window, default=None,
                   help="x_lo,x_hi,p_lo,p_hi")
    p.set_defaults(func=_cmd_wigner)

    p = sub.add_parser("overlap", help="<D> along a displacement ray")
    _add_state_flags(p)
    _add_ray_flags(p)
    p.add_argument("--route", choices=["direct", "wigner-ft", "autocorr", "all"],
                   default="all")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_overlap)

    p = sub.add_parser("mc", help="Monte Carlo shell overlap along a ray")
    p.add_argument("--geom", choices=["disk", "gas"], required=True)
    p.add_argument("--L", type=float, default=1.0, help="radius / box side")
    p.add_argument("--P", type=float, default=1.0, help="shell momentum scale")
    p.add_argument("--N", type=int, default=1, help="gas particle count")
    p.add_argument("--hbar", type=float, default=1.0)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    _add_ray_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_mc)

    p = sub.add_parser("oracle", help="analytic overlap sweep")
    p.add_argument("--formula", choices=["eq7", "eq12", "eq13"], required=True)
    p.add_argument("--L", type=float, default=1.0)
    p.add_argument("--P", type=float, default=1.0)
    p.add_argument("--N", type=int, default=1)
    p.add_argument("--hbar", type=float, default=1.0)
    _add_ray_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("ring", help="ringing report for a series")
    p.add_argument("--series", default=None, help="overlap-series CSV or JSON file")
    p.add_argument("--oracle", choices=["eq7", "eq12", "eq13"], default=None)
    p.add_argument("--L", type=float, default=1.0)
    p.add_argument("--P", type=float, default=1.0)
    p.add_argument("--N", type=int, default=1)
    p.add_argument("--hbar", type=float, default=1.0)
    p.add_argument("--dx-ray", action="store_true")
    p.add_argument("--dp-ray", action="store_true")
    p.add_argument("--ray", type=_float_list, default=None)
    p.add_argument("--tmax", type=float, default=40.0)
    p.add_argument("--points", type=int, default=4096)
    p.add_argument("--skip-peaks", type=int, default=2)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_ring)

    p = sub.add_parser("study", help="convergence / variance-scaling study")
    p.add_argument("--study", choices=["gaussian-convergence", "variance-scaling"],
                   required=True)
    p.add_argument("--N", type=_int_list, default=None, help="particle counts")
    p.add_argument("--k", type=_float_list, default=None, help="wavenumbers")
    p.add_argument("--tmax", type=float, default=3.0)
    p.add_argument("--points", type=int, default=151)
    p.add_argument("--ensemble", type=int, default=48)
    p.add_argument("--cell", type=float, default=1.0)
    p.add_argument("--radius", type=float, default=4.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--hbar", type=float, default=1.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_study)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        effective_workers()  # validate SUBPLANCK_THREADS early
        return args.func(args)
    except RingingError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return _EXIT_NOT_APPLICABLE
    except DomainError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return _EXIT_DOMAIN
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return _EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
