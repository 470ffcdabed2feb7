"""Command-line front end: experiment dispatch, timing, and serialization.

    gspm2 <kind> --config cfg.json [--out DIR] [--full-scale] [--formats csv,json,vtk]

Exit codes: 0 success, 2 configuration error, 3 numerical blow-up. Stability
scans absorb blow-ups internally (they are the signal being measured, not a
failure).
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import convergence as conv
from . import io as gio
from .config import DEFAULT_CONSTANTS, KINDS, ConfigError, ExperimentConfig
from .manufactured import case_1d, case_3d, neel_wall_initial
from .mesh import Grid, sample_vector
from .physics import (MaterialParams, PhysicalConstants, build_demag_kernel,
                      energy, nondimensionalize)
from .schemes import BlowUpError

FULL_SCALE_GRID = (250, 250, 5)   # 4 nm cubic cells over 1 x 1 x 0.02 um


@dataclass
class RunRecord:
    """Everything one experiment produced, ready for `emit`."""

    config: dict
    summary: dict = field(default_factory=dict)
    report: dict | None = None
    energy_series: list | None = None     # (step, t, energy)
    timing_series: list | None = None     # (step, wall ms); never merged into
                                          # deterministic payloads
    error_rows: list | None = None        # (step_or_h, err_inf, err_l2)
    final_field: np.ndarray | None = None
    snapshots: list = field(default_factory=list)   # (step, (3, nx, ny, 1) slice)
    grid: Grid | None = None


def _manufactured_case(name: str, alpha: float):
    return case_1d(alpha) if name == "mms-1d" else case_3d(alpha)


def _run_converge_time(cfg: ExperimentConfig) -> RunRecord:
    case = _manufactured_case(cfg.case, cfg.alpha)
    report = conv.run_time_convergence(cfg.scheme, case, cfg.dx, cfg.dt_list,
                                       cfg.t_final)
    return RunRecord(config=cfg.to_dict(), report=report.to_dict(),
                     error_rows=report.points,
                     summary={"order": report.order_inf,
                              "order_l2": report.order_l2})


def _run_converge_space(cfg: ExperimentConfig) -> RunRecord:
    case = _manufactured_case(cfg.case, cfg.alpha)
    report = conv.run_space_convergence(cfg.scheme, case, cfg.dx_list, cfg.dt,
                                        cfg.t_final)
    return RunRecord(config=cfg.to_dict(), report=report.to_dict(),
                     error_rows=report.points,
                     summary={"order": report.order_inf,
                              "order_l2": report.order_l2})


def _run_converge_2d(cfg: ExperimentConfig) -> RunRecord:
    domain = tuple(cfg.domain) if cfg.domain else (1.0, 0.2)
    report = conv.run_wall_reference_convergence(
        cfg.scheme, alpha=cfg.alpha, dx=cfg.dx, domain=domain,
        t_final=cfg.t_final, dt_divisors=cfg.dt_divisors,
        ref_divisor=cfg.ref_divisor)
    return RunRecord(config=cfg.to_dict(), report=report.to_dict(),
                     error_rows=report.points,
                     summary={"order": report.order_inf,
                              "order_l2": report.order_l2})


def _run_stability(cfg: ExperimentConfig) -> RunRecord:
    alpha = cfg.alpha if cfg.alpha is not None else 1.0
    t_final = cfg.t_final if cfg.t_final is not None else 1.0
    case = case_1d(alpha)
    report = conv.stability_scan(cfg.scheme, case, cfg.h_list, t_final=t_final,
                                 cfl_bracket=tuple(cfg.cfl_bracket),
                                 rounds=cfg.rounds, error_cap=cfg.error_cap)
    summary = {"rows": [{"h": r.h, "dt_stable": r.dt_stable}
                        for r in report.rows]}
    return RunRecord(config=cfg.to_dict(), report=report.to_dict(),
                     summary=summary)


def _initial_field(grid: Grid, init: dict | None, seed: int) -> np.ndarray:
    init = init or {"type": "uniform", "direction": [0.0, 0.0, 1.0]}
    kind = init.get("type", "uniform")
    if kind == "uniform":
        d = np.asarray(init.get("direction", [0.0, 0.0, 1.0]), dtype=float)
        d = d / np.linalg.norm(d)
        return sample_vector(grid, lambda X, Y, Z: (
            np.full_like(X, d[0]), np.full_like(X, d[1]), np.full_like(X, d[2])))
    if kind == "stripes":
        # in-plane y-stripes on the outer fifths of the x extent, x elsewhere
        lx = grid.lx

        def fn(X, Y, Z):
            outer = (X <= lx / 5.0) | (X >= 4.0 * lx / 5.0)
            return (np.where(outer, 0.0, 1.0), np.where(outer, 1.0, 0.0),
                    np.zeros_like(X))

        return sample_vector(grid, fn)
    if kind == "neel-wall":
        eta = float(init.get("eta", grid.hx))
        return sample_vector(grid, neel_wall_initial(eta))
    if kind == "random":
        rng = np.random.default_rng(seed)
        m = rng.standard_normal((3,) + grid.shape)
        return m / np.sqrt((m * m).sum(axis=0))
    raise ConfigError(f"unknown initial state type {kind!r}")


def _timed_integrate(scheme, m0, grid, params, dt, n_steps, *, kernel,
                     snapshot_every):
    """Shared stepping loop for micromag/solve kinds: records the energy after
    every step, stepper wall time (exclusive of the recording itself), and
    mid-plane snapshots at the requested cadence."""
    energy_series = [(0, 0.0, energy(params, grid, m0, kernel))]
    timing_series = []
    snapshots = []
    mid_k = grid.nz // 2
    if snapshot_every:
        snapshots.append((0, m0[:, :, :, mid_k:mid_k + 1].copy()))
    last = time.perf_counter()

    def on_step(state):
        nonlocal last
        timing_series.append((state.step_index, (time.perf_counter() - last) * 1e3))
        energy_series.append(
            (state.step_index, state.t, energy(params, grid, state.m_curr, kernel)))
        if snapshot_every and state.step_index % snapshot_every == 0:
            snapshots.append(
                (state.step_index, state.m_curr[:, :, :, mid_k:mid_k + 1].copy()))
        last = time.perf_counter()

    result = conv.integrate(scheme, m0, grid, params, dt, n_steps,
                            kernel=kernel, on_step=on_step)
    return result, energy_series, timing_series, snapshots


def _run_micromag(cfg: ExperimentConfig, full_scale: bool) -> RunRecord:
    constants = cfg.constants or DEFAULT_CONSTANTS
    pc = PhysicalConstants(A=constants["A"], Ms=constants["Ms"],
                           Ku=constants["Ku"], gamma=constants["gamma"],
                           L=constants["L"])
    eps, q, time_unit = nondimensionalize(pc)
    if full_scale:
        nx, ny, nz = cfg.full_scale_grid or FULL_SCALE_GRID
    else:
        nx, ny, nz = cfg.grid or (64, 64, 3)
    # film extent over the rescaling length L
    lx, ly, lz = 1.0, 1.0, 0.02
    grid = Grid(nx, ny, nz, lx, ly, lz)
    params = MaterialParams(eps=eps, alpha=cfg.alpha, q=q, stray_enabled=True)
    kernel = build_demag_kernel(grid)
    dt_seconds = cfg.dt_seconds if cfg.dt_seconds is not None else 1.0e-12
    t_final_seconds = (cfg.t_final_seconds if cfg.t_final_seconds is not None
                       else 2.0e-9)
    dt = dt_seconds / time_unit
    n_steps = round(t_final_seconds / dt_seconds)
    snapshot_every = cfg.snapshot_every or 500

    m0 = _initial_field(grid, {"type": "stripes"}, cfg.seed)
    result, energy_series, timing_series, snapshots = _timed_integrate(
        "scheme-a", m0, grid, params, dt, n_steps, kernel=kernel,
        snapshot_every=snapshot_every)

    summary = {
        "eps": eps, "q": q, "time_unit_seconds": time_unit,
        "dt_dimensionless": dt, "t_final_dimensionless": n_steps * dt,
        "n_steps": n_steps,
        "initial_energy": energy_series[0][2],
        "terminal_energy": energy_series[-1][2],
        "max_unit_deviation": result.max_unit_deviation,
    }
    return RunRecord(config=cfg.to_dict(), summary=summary,
                     energy_series=energy_series, timing_series=timing_series,
                     final_field=result.state.m_curr, snapshots=snapshots,
                     grid=grid)


def _run_solve(cfg: ExperimentConfig) -> RunRecord:
    domain = cfg.domain or [1.0, 1.0, 1.0]
    if len(domain) != 3:
        raise ConfigError("solve domain must be [lx, ly, lz]")
    grid = Grid(*cfg.grid, *[float(v) for v in domain])
    p = dict(cfg.params)
    params = MaterialParams(eps=p["eps"], alpha=p["alpha"], q=p.get("q", 0.0),
                            h_ext=tuple(p.get("h_ext", (0.0, 0.0, 0.0))),
                            stray_enabled=bool(p.get("stray", False)))
    kernel = build_demag_kernel(grid) if params.stray_enabled else None
    m0 = _initial_field(grid, cfg.initial, cfg.seed)
    result, energy_series, timing_series, snapshots = _timed_integrate(
        cfg.scheme, m0, grid, params, cfg.dt, cfg.n_steps, kernel=kernel,
        snapshot_every=cfg.snapshot_every)
    summary = {
        "initial_energy": energy_series[0][2],
        "terminal_energy": energy_series[-1][2],
        "max_unit_deviation": result.max_unit_deviation,
        "n_steps": result.n_steps,
    }
    return RunRecord(config=cfg.to_dict(), summary=summary,
                     energy_series=energy_series, timing_series=timing_series,
                     final_field=result.state.m_curr, snapshots=snapshots,
                     grid=grid)


def run(cfg: ExperimentConfig, full_scale: bool = False) -> RunRecord:
    """Dispatch one validated config; returns the in-memory record."""
    if cfg.kind == "converge-time":
        return _run_converge_time(cfg)
    if cfg.kind == "converge-space":
        return _run_converge_space(cfg)
    if cfg.kind == "converge-2d":
        return _run_converge_2d(cfg)
    if cfg.kind == "stability":
        return _run_stability(cfg)
    if cfg.kind == "micromag":
        return _run_micromag(cfg, full_scale)
    if cfg.kind == "solve":
        return _run_solve(cfg)
    raise ConfigError(f"unknown kind {cfg.kind!r}")


def emit(record: RunRecord, out_dir: str, formats) -> list:
    """Write the record; returns the list of paths produced."""
    gio.ensure_dir(out_dir)
    formats = set(formats)
    paths = []

    def note(p):
        paths.append(p)
        return p

    if "json" in formats:
        gio.write_json(note(os.path.join(out_dir, "config.json")), record.config)
        payload = {"schema_version": gio.SCHEMA_VERSION,
                   "kind": record.config.get("kind"),
                   "summary": record.summary}
        if record.report is not None:
            payload["report"] = record.report
        gio.write_json(note(os.path.join(out_dir, "report.json")), payload)
    if "csv" in formats:
        if record.energy_series is not None:
            gio.write_csv(note(os.path.join(out_dir, "energy.csv")),
                          ("step", "t", "energy"),
                          [(s, float(t), float(e)) for s, t, e in record.energy_series])
        if record.timing_series is not None:
            gio.write_csv(note(os.path.join(out_dir, "timing.csv")),
                          ("step", "walltime_ms"),
                          [(s, float(w)) for s, w in record.timing_series])
        if record.error_rows is not None:
            gio.write_csv(note(os.path.join(out_dir, "errors.csv")),
                          ("step", "error_inf", "error_l2"),
                          [(float(s), float(a), float(b))
                           for s, a, b in record.error_rows])
    if "vtk" in formats and record.grid is not None:
        grid = record.grid
        origin = (grid.hx / 2, grid.hy / 2, grid.hz / 2)
        for step, m_slice in record.snapshots:
            mid_z = (grid.nz // 2 + 0.5) * grid.hz
            gio.write_vtk_structured_points(
                note(os.path.join(out_dir, f"m_{step:06d}.vtk")), m_slice,
                (origin[0], origin[1], mid_z), grid.spacing)
        if record.final_field is not None:
            gio.write_vtk_structured_points(
                note(os.path.join(out_dir, "final.vtk")), record.final_field,
                origin, grid.spacing)
    return paths


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="gspm2",
        description="Gauss-Seidel projection experiments for magnetization dynamics")
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("--config", required=True, help="path to a JSON config")
    parser.add_argument("--out", default="gspm2-out", help="output directory")
    parser.add_argument("--full-scale", action="store_true",
                        help="micromag: use the full 250x250x5 production grid")
    parser.add_argument("--formats", default="csv,json,vtk",
                        help="comma-separated subset of csv,json,vtk")
    args = parser.parse_args(argv)

    formats = {f.strip() for f in args.formats.split(",") if f.strip()}
    unknown = formats - {"csv", "json", "vtk"}
    if unknown:
        print(f"gspm2: unknown formats {sorted(unknown)}", file=sys.stderr)
        return 2

    try:
        cfg = ExperimentConfig.from_file(args.config)
        if cfg.kind != args.kind:
            raise ConfigError(
                f"config kind {cfg.kind!r} does not match command {args.kind!r}")
    except ConfigError as exc:
        print(f"gspm2: config error: {exc}", file=sys.stderr)
        return 2

    try:
        record = run(cfg, full_scale=args.full_scale)
    except ConfigError as exc:
        print(f"gspm2: config error: {exc}", file=sys.stderr)
        return 2
    except BlowUpError as exc:
        print(f"gspm2: numerical blow-up: {exc}", file=sys.stderr)
        return 3

    for path in emit(record, args.out, formats):
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
