"""Convergence studies against exact or reference solutions, and the CFL scanner.

`integrate` is the shared driver: it bootstraps two-level schemes with one
first-order step, advances to the terminal time, and tracks the worst
post-projection unit-length deviation so the projection invariant can be
asserted across whole studies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .manufactured import ManufacturedCase, neel_wall_initial
from .mesh import Grid, norm_inf, norm_l2, sample_vector
from .physics import MaterialParams
from .schemes import (BlowUpError, SchemeState, bdf2_reference_step, gspm1_step,
                      scheme_a_step, scheme_b_init, scheme_b_step, si2_step)
from .spectral import build_plan

SCHEME_NAMES = ("gspm1", "si2", "scheme-a", "scheme-b", "bdf2-ref")

_STEPPERS = {
    "gspm1": gspm1_step,
    "si2": si2_step,
    "scheme-a": scheme_a_step,
    "scheme-b": scheme_b_step,
    "bdf2-ref": bdf2_reference_step,
}


@dataclass
class IntegrationResult:
    state: SchemeState
    max_unit_deviation: float
    n_steps: int
    solve_count: int


def integrate(scheme: str, m0: np.ndarray, grid: Grid, params: MaterialParams,
              dt: float, n_steps: int, *, plan=None, kernel=None, source=None,
              on_step=None, step_kwargs=None) -> IntegrationResult:
    """Advance n_steps of size dt from m0 with the named scheme.

    Two-level schemes take their first step with the first-order method (one
    such step costs only O(dt^2) globally); the three-solve scheme
    additionally initializes its lagged fields from the first two levels.
    `on_step(state)` is called after every step; `step_kwargs` are forwarded
    to the named scheme's stepper (not the bootstrap), e.g. a Krylov `tol`.
    """
    if scheme not in _STEPPERS:
        raise ValueError(f"unknown scheme {scheme!r}, expected one of {SCHEME_NAMES}")
    if plan is None:
        plan = build_plan(grid)
    stepper = _STEPPERS[scheme]
    extra = dict(step_kwargs or {})
    state = SchemeState.from_initial(np.asarray(m0, dtype=float))
    solves_before = plan.solve_count
    max_dev = 0.0
    for k in range(n_steps):
        if k == 0 and scheme != "gspm1":
            state = gspm1_step(state, params, plan, dt, kernel=kernel, source=source)
            if scheme == "scheme-b":
                state = scheme_b_init(state, params, plan, dt)
        else:
            state = stepper(state, params, plan, dt, kernel=kernel, source=source,
                            **extra)
        mag = np.sqrt((state.m_curr * state.m_curr).sum(axis=0))
        max_dev = max(max_dev, float(np.abs(mag - 1.0).max()))
        if on_step is not None:
            on_step(state)
    return IntegrationResult(state=state, max_unit_deviation=max_dev,
                             n_steps=n_steps,
                             solve_count=plan.solve_count - solves_before)


def observed_order(points) -> float:
    """Least-squares slope of log(error) against log(step size)."""
    pts = [(float(s), float(e)) for s, e in points]
    if len(pts) < 2:
        raise ValueError("need at least 2 points to fit an order")
    for s, e in pts:
        if not (s > 0 and e > 0):
            raise ValueError(f"steps and errors must be positive, got ({s}, {e})")
    x = np.log([s for s, _ in pts])
    y = np.log([e for _, e in pts])
    return float(np.polyfit(x, y, 1)[0])


@dataclass
class ConvergenceReport:
    """Error-versus-resolution table with fitted orders in both norms."""

    scheme: str
    variable: str                      # "dt" or "h"
    points: list                       # (step, error_inf, error_l2)
    order_inf: float = 0.0
    order_l2: float = 0.0
    max_unit_deviation: float = 0.0

    def fit(self):
        self.order_inf = observed_order([(s, ei) for s, ei, _ in self.points])
        self.order_l2 = observed_order([(s, el) for s, _, el in self.points])
        return self

    def to_dict(self) -> dict:
        return {
            "scheme": self.scheme,
            "variable": self.variable,
            "points": [
                {"step": s, "error_inf": ei, "error_l2": el}
                for s, ei, el in self.points
            ],
            "order": self.order_inf,
            "order_inf": self.order_inf,
            "order_l2": self.order_l2,
            "max_unit_deviation": self.max_unit_deviation,
        }


def _case_grid(case: ManufacturedCase, dx: float) -> Grid:
    n = round(1.0 / dx)
    if abs(n * dx - 1.0) > 1e-9:
        raise ValueError(f"dx={dx} does not divide the unit domain")
    if case.dimension == 1:
        return Grid.line(n)
    return Grid.cube(n)


def _errors(grid: Grid, m: np.ndarray, m_ref: np.ndarray) -> tuple:
    diff = m - m_ref
    return norm_inf(diff), norm_l2(grid, diff)


def run_time_convergence(scheme: str, case: ManufacturedCase, dx: float,
                         dt_list, t_final: float) -> ConvergenceReport:
    """Errors against the exact solution at t_final for several step sizes."""
    grid = _case_grid(case, dx)
    plan = build_plan(grid)
    params = MaterialParams(eps=1.0, alpha=case.alpha)
    m0 = sample_vector(grid, lambda X, Y, Z: case.exact(X, Y, Z, 0.0))
    report = ConvergenceReport(scheme=scheme, variable="dt", points=[])
    X, Y, Z = grid.centers
    for dt in dt_list:
        n = round(t_final / dt)
        res = integrate(scheme, m0, grid, params, dt, n, plan=plan,
                        source=case.source)
        exact = case.exact(X, Y, Z, res.state.t)
        err_inf, err_l2 = _errors(grid, res.state.m_curr, exact)
        report.points.append((dt, err_inf, err_l2))
        report.max_unit_deviation = max(report.max_unit_deviation,
                                        res.max_unit_deviation)
    return report.fit()


def run_space_convergence(scheme: str, case: ManufacturedCase, dx_list,
                          dt: float, t_final: float) -> ConvergenceReport:
    """Errors against the exact solution at t_final for several mesh sizes."""
    report = ConvergenceReport(scheme=scheme, variable="h", points=[])
    n_steps = round(t_final / dt)
    params = MaterialParams(eps=1.0, alpha=case.alpha)
    for dx in dx_list:
        grid = _case_grid(case, dx)
        plan = build_plan(grid)
        m0 = sample_vector(grid, lambda X, Y, Z: case.exact(X, Y, Z, 0.0))
        res = integrate(scheme, m0, grid, params, dt, n_steps, plan=plan,
                        source=case.source)
        X, Y, Z = grid.centers
        exact = case.exact(X, Y, Z, res.state.t)
        err_inf, err_l2 = _errors(grid, res.state.m_curr, exact)
        report.points.append((dx, err_inf, err_l2))
        report.max_unit_deviation = max(report.max_unit_deviation,
                                        res.max_unit_deviation)
    return report.fit()


def run_wall_reference_convergence(scheme: str, *, alpha: float = 0.01,
                                   dx: float = 0.1, domain=(1.0, 0.2),
                                   t_final: float = 4.0e-5,
                                   dt_divisors=(10, 20, 40, 80),
                                   ref_divisor: int = 5000,
                                   reference: np.ndarray | None = None) -> ConvergenceReport:
    """Source-free 2D wall relaxation measured against a fine reference run.

    The reference trajectory comes from the coupled BDF2 integrator at
    t_final/ref_divisor (pass `reference` to reuse one across schemes).
    """
    lx, ly = domain
    grid = Grid.rect(round(lx / dx), round(ly / dx), lx, ly)
    plan = build_plan(grid)
    params = MaterialParams(eps=1.0, alpha=alpha)
    m0 = sample_vector(grid, neel_wall_initial(eta=dx))
    if reference is None:
        reference = wall_reference_solution(grid, params, t_final, ref_divisor,
                                            m0=m0, plan=plan)
    report = ConvergenceReport(scheme=scheme, variable="dt", points=[])
    for div in dt_divisors:
        dt = t_final / div
        res = integrate(scheme, m0, grid, params, dt, div, plan=plan)
        err_inf, err_l2 = _errors(grid, res.state.m_curr, reference)
        report.points.append((dt, err_inf, err_l2))
        report.max_unit_deviation = max(report.max_unit_deviation,
                                        res.max_unit_deviation)
    return report.fit()


def wall_reference_solution(grid: Grid, params: MaterialParams, t_final: float,
                            ref_divisor: int, *, m0=None, plan=None,
                            tol: float = 5e-14) -> np.ndarray:
    """Fine-step coupled-BDF2 trajectory used as the 2D benchmark reference.

    The Krylov tolerance is tightened well below the per-step default so the
    accumulated solver noise (about ref_divisor * tol) stays under the
    smallest errors being measured against this reference.
    """
    if m0 is None:
        m0 = sample_vector(grid, neel_wall_initial(eta=grid.hx))
    res = integrate("bdf2-ref", m0, grid, params, t_final / ref_divisor,
                    ref_divisor, plan=plan, step_kwargs={"tol": tol})
    return res.state.m_curr


@dataclass
class StabilityRow:
    h: float
    dt_stable: float               # final bisection midpoint
    bracket: tuple                 # (largest known-stable dt, smallest known-unstable dt)
    probes: list = field(default_factory=list)   # (dt, stable?) evidence

    def to_dict(self) -> dict:
        return {"h": self.h, "dt_stable": self.dt_stable,
                "bracket_stable": self.bracket[0],
                "bracket_unstable": self.bracket[1],
                "probes": [{"dt": d, "stable": s} for d, s in self.probes]}


@dataclass
class StabilityReport:
    scheme: str
    alpha: float
    t_final: float
    rows: list

    def to_dict(self) -> dict:
        return {"scheme": self.scheme, "alpha": self.alpha,
                "t_final": self.t_final,
                "rows": [r.to_dict() for r in self.rows]}


def classify_stability(scheme: str, case: ManufacturedCase, h: float, dt: float,
                       t_final: float = 1.0, error_cap: float | None = None) -> bool:
    """Run the sourced 1D benchmark to t_final; unstable iff the run blows up.

    Blow-up means the steppers' own detector fires: non-finite values,
    pre-projection magnitudes beyond 10, or a projection magnitude collapse.
    An optional error_cap additionally classifies bounded-but-diverged runs
    (terminal error above the cap) as unstable; by default accuracy is not
    part of the stability question, matching how the stability table treats
    the unconditionally stable scheme at very large steps.
    """
    grid = _case_grid(case, h)
    params = MaterialParams(eps=1.0, alpha=case.alpha)
    m0 = sample_vector(grid, lambda X, Y, Z: case.exact(X, Y, Z, 0.0))
    n = max(1, round(t_final / dt))
    try:
        res = integrate(scheme, m0, grid, params, dt, n, source=case.source)
    except BlowUpError:
        return False
    X, Y, Z = grid.centers
    err = norm_inf(res.state.m_curr - case.exact(X, Y, Z, res.state.t))
    if not np.isfinite(err):
        return False
    return error_cap is None or err <= error_cap


def stability_scan(scheme: str, case: ManufacturedCase, h_list, *,
                   t_final: float = 1.0, cfl_bracket=(0.125, 1.0),
                   rounds: int = 6, error_cap: float | None = None) -> StabilityReport:
    """Bisect the largest stable dt per mesh size.

    The bracket is given as multiples of h^2: dt in [lo*h^2, hi*h^2] must
    straddle the threshold or the scan refuses to run. Geometric bisection
    (>= 6 rounds) narrows the bracket well below the factor-of-two level at
    which CFL constants are quoted.
    """
    lo_c, hi_c = cfl_bracket
    if not (0 < lo_c < hi_c):
        raise ValueError(f"invalid CFL bracket {cfl_bracket}")
    rows = []
    for h in h_list:
        lo = lo_c * h * h
        hi = hi_c * h * h
        probes = []

        def probe(dt):
            ok = classify_stability(scheme, case, h, dt, t_final, error_cap)
            probes.append((dt, ok))
            return ok

        if not probe(lo):
            raise ValueError(
                f"stability bracket invalid at h={h}: dt={lo:.3e} already unstable")
        if probe(hi):
            raise ValueError(
                f"stability bracket invalid at h={h}: dt={hi:.3e} still stable")
        for _ in range(rounds):
            mid = math.sqrt(lo * hi)
            if probe(mid):
                lo = mid
            else:
                hi = mid
        rows.append(StabilityRow(h=h, dt_stable=math.sqrt(lo * hi),
                                 bracket=(lo, hi), probes=probes))
    return StabilityReport(scheme=scheme, alpha=case.alpha, t_final=t_final,
                           rows=rows)
