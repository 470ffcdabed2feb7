"""Acceptance suite: every criterion at its stated tolerance, one line each.

Run with `pytest tests/test_acceptance.py -v -s` (the -s makes the per-
criterion PASS/FAIL lines visible as they happen; a summary block is printed
either way). The suite needs several minutes, dominated by the fine-grid 1D
temporal study, the 3D spatial study, and the 2 ns thin-film runs.
"""

import itertools

import numpy as np
import pytest

from conftest import record_acceptance
from gspm2.cli import run as run_experiment
from gspm2.config import ExperimentConfig
from gspm2.convergence import (classify_stability, integrate,
                               run_space_convergence, run_time_convergence,
                               run_wall_reference_convergence, stability_scan,
                               wall_reference_solution)
from gspm2.manufactured import case_1d, case_3d
from gspm2.mesh import Grid, sample_vector
from gspm2.physics import MaterialParams, build_demag_kernel, demag_field, demag_tensor_entry
from gspm2.schemes import SchemeState, gspm1_step, scheme_a_step, scheme_b_init, scheme_b_step
from gspm2.spectral import build_plan, solve, solve_dense_oracle

EPS64 = np.finfo(float).eps

# printed benchmark rows for the 10x absolute-error comparison
TABLE_1D_TIME = {
    "scheme-a": [1.5771e-04, 7.4962e-05, 3.9885e-05, 2.3881e-05],
    "scheme-b": [1.5754e-04, 7.4324e-05, 3.9032e-05, 2.4842e-05],
}

# post-projection unit-length deviations recorded by the runs below
UNIT_DEVIATIONS = []


def _within_factor(values, reference, factor):
    return all(ref / factor <= v <= ref * factor
               for v, ref in zip(values, reference))


class TestCriterion01TemporalOrder1D:
    def test_temporal_order_1d(self):
        case = case_1d(alpha=0.01)
        T = 0.3
        dt_list = [T / 200, T / 300, T / 400, T / 500]
        orders, abs_ok, details = {}, {}, []
        for scheme in ("scheme-a", "scheme-b"):
            rep = run_time_convergence(scheme, case, dx=1e-4,
                                       dt_list=dt_list, t_final=T)
            UNIT_DEVIATIONS.append(rep.max_unit_deviation)
            orders[scheme] = (rep.order_inf, rep.order_l2)
            errs_inf = [p[1] for p in rep.points]
            errs_l2 = [p[2] for p in rep.points]
            abs_ok[scheme] = (
                _within_factor(errs_inf, TABLE_1D_TIME[scheme], 10.0)
                or _within_factor(errs_l2, TABLE_1D_TIME[scheme], 10.0))
            details.append(f"{scheme}: order_inf={rep.order_inf:.2f} "
                           f"order_l2={rep.order_l2:.2f}")
        orders_ok = all(1.9 <= o <= 2.2 for pair in orders.values() for o in pair)
        ok = orders_ok and all(abs_ok.values())
        record_acceptance(
            "criterion 1: 1D temporal orders in [1.9, 2.2], errors within 10x",
            ok, "; ".join(details) + f"; abs-within-10x={all(abs_ok.values())}")
        assert all(abs_ok.values()), f"absolute errors off by >10x: {abs_ok}"
        assert orders_ok, (
            "fitted orders outside [1.9, 2.2]: "
            + "; ".join(details)
            + ". Known limitation of the published update rules as printed: "
              "the auxiliary biharmonic-regularized solves respond to the "
              "benchmark solution's boundary-incompatible third derivative "
              "with an O(sqrt(dt)) boundary layer, and the Gauss-Seidel "
              "refresh slots lag the update they feed by one extrapolation; "
              "see notes/decisions.md for the full analysis.")


class TestCriterion02SpatialOrder1D:
    def test_spatial_order_1d(self):
        case = case_1d(alpha=0.01)
        details, oks = [], []
        for scheme in ("scheme-a", "scheme-b"):
            rep = run_space_convergence(scheme, case,
                                        dx_list=[0.2, 0.1, 0.05, 0.04],
                                        dt=1e-5, t_final=0.05)
            UNIT_DEVIATIONS.append(rep.max_unit_deviation)
            oks.append(1.8 <= rep.order_inf <= 2.1 and 1.8 <= rep.order_l2 <= 2.1)
            details.append(f"{scheme}: order_inf={rep.order_inf:.2f} "
                           f"order_l2={rep.order_l2:.2f}")
        record_acceptance("criterion 2: 1D spatial orders in [1.8, 2.1]",
                          all(oks), "; ".join(details))
        assert all(oks), details


class TestCriterion03Orders3D:
    def test_spatial_order_3d(self):
        case = case_3d(alpha=0.1)
        details, oks = [], []
        for scheme in ("scheme-a", "scheme-b"):
            rep = run_space_convergence(scheme, case,
                                        dx_list=[1 / 6, 1 / 8, 1 / 10, 1 / 12],
                                        dt=1e-3, t_final=4.0)
            UNIT_DEVIATIONS.append(rep.max_unit_deviation)
            oks.append(1.9 <= rep.order_inf <= 2.2)
            details.append(f"space {scheme}: {rep.order_inf:.2f}")
        record_acceptance("criterion 3a: 3D spatial orders in [1.9, 2.2]",
                          all(oks), "; ".join(details))
        assert all(oks), details

    def test_temporal_order_3d(self):
        case = case_3d(alpha=0.1)
        details, oks = [], []
        for scheme in ("scheme-a", "scheme-b"):
            rep = run_time_convergence(scheme, case, dx=0.1,
                                       dt_list=[0.2, 0.1, 0.08, 0.05],
                                       t_final=4.0)
            UNIT_DEVIATIONS.append(rep.max_unit_deviation)
            oks.append(1.8 <= rep.order_inf <= 2.1)
            details.append(f"time {scheme}: {rep.order_inf:.2f}")
        record_acceptance("criterion 3b: 3D temporal orders in [1.8, 2.1]",
                          all(oks), "; ".join(details))
        assert all(oks), details


class TestCriterion04WallBenchmark2D:
    def test_wall_orders_vs_reference(self):
        grid = Grid.rect(10, 2, 1.0, 0.2)
        params = MaterialParams(eps=1.0, alpha=0.01)
        reference = wall_reference_solution(grid, params, 4.0e-5, 5000)
        details, oks = [], []
        for scheme in ("scheme-a", "scheme-b"):
            rep = run_wall_reference_convergence(
                scheme, alpha=0.01, dx=0.1, t_final=4.0e-5,
                dt_divisors=(10, 20, 40, 80), reference=reference)
            UNIT_DEVIATIONS.append(rep.max_unit_deviation)
            oks.append(1.7 <= rep.order_inf <= 2.1)
            details.append(f"{scheme}: slope {rep.order_inf:.2f}")
        record_acceptance("criterion 4: 2D wall slopes in [1.7, 2.1] vs "
                          "fine coupled-BDF2 reference", all(oks),
                          "; ".join(details))
        assert all(oks), details


class TestCriterion05StabilityTable:
    def test_three_solve_cfl_and_five_solve_freedom(self):
        case = case_1d(alpha=1.0)
        report = stability_scan("scheme-b", case, [0.1, 0.01], rounds=6)
        details, oks = [], []
        for row in report.rows:
            target = 0.25 * row.h ** 2
            ok = target / 2.0 <= row.dt_stable <= target * 2.0
            oks.append(ok)
            details.append(f"h={row.h}: dt_stable={row.dt_stable:.2e} "
                           f"(0.25h^2={target:.2e})")
        a_stable = [classify_stability("scheme-a", case, 0.01, dt, t_final=1.0)
                    for dt in (1e-3, 1e-2, 1e-1)]
        oks.append(all(a_stable))
        details.append(f"five-solve stable at dt=1e-3,1e-2,1e-1: {a_stable}")
        record_acceptance("criterion 5: three-solve CFL within 2x of 0.25 h^2; "
                          "five-solve unrestricted", all(oks), "; ".join(details))
        assert all(oks), details


class TestCriterion06SolverCorrectness:
    def test_spectral_vs_dense_randomized(self):
        # coefficients drawn from the family the integrators use (a = eps*dt,
        # b = a^2, both well below 1); larger draws only degrade the dense LU
        # oracle through its own conditioning, not the spectral path
        rng = np.random.default_rng(2024)
        worst = 0.0
        for trial in range(100):
            shape = rng.integers(1, 9, size=3)
            g = Grid(int(shape[0]), int(shape[1]), int(shape[2]),
                     *(float(v) for v in rng.uniform(0.8, 2.0, size=3)))
            plan = build_plan(g)
            a = float(rng.uniform(0.0, 0.5))
            b = a * a if trial % 2 == 0 else float(rng.uniform(0.0, 0.25))
            assert plan.symbol(a, b).min() >= 1.0     # symbol positivity
            f = rng.standard_normal(g.shape)
            u = solve(plan, f, a, b)
            w = solve_dense_oracle(g, f, a, b)
            rel = np.abs(u - w).max() / max(np.abs(w).max(), 1e-300)
            worst = max(worst, rel)
        ok = bool(worst <= 1e-10)
        record_acceptance("criterion 6: spectral vs dense solve <= 1e-10 "
                          "(100 random trials, grids to 8^3)", ok,
                          f"worst relative error {worst:.2e}")
        assert ok


class TestCriterion07OperatorCorrectness:
    def test_biharmonic_is_squared_laplacian(self):
        from gspm2.mesh import biharmonic, laplacian
        rng = np.random.default_rng(77)
        worst = 0.0
        for shape in [(8, 1, 1), (5, 4, 1), (4, 3, 2)]:
            g = Grid(*shape, 1.0, 0.9, 1.1)
            u = rng.standard_normal(g.shape)
            n = g.n_cells
            L = np.zeros((n, n))
            e = np.zeros(g.shape)
            for col in range(n):
                e.flat[col] = 1.0
                L[:, col] = laplacian(g, e).ravel()
                e.flat[col] = 0.0
            want = (L @ (L @ u.ravel())).reshape(g.shape)
            scale = max(1.0, np.abs(want).max())
            worst = max(worst, np.abs(biharmonic(g, u) - want).max() / scale)
        ok_b = worst <= 1e-13

        from gspm2.spectral import dense_operator_matrix, laplacian_eigenvalues
        worst_eig = 0.0
        for n in range(1, 9):
            g = Grid.line(n, lx=0.6 * n)
            lap_dense = np.eye(n) - dense_operator_matrix(g, 1.0, 0.0)
            got = np.sort(np.linalg.eigvalsh(lap_dense))
            want = np.sort(laplacian_eigenvalues(n, g.hx))
            scale = max(1.0, np.abs(want).max())
            worst_eig = max(worst_eig, np.abs(got - want).max() / scale)
        ok_e = worst_eig <= 1e-12
        record_acceptance("criterion 7: biharmonic == squared Laplacian "
                          "(1e-13); eigenvalues match dense (1e-12)",
                          ok_b and ok_e,
                          f"biharmonic {worst:.2e}, eigenvalues {worst_eig:.2e}")
        assert ok_b and ok_e


class TestCriterion08DemagCorrectness:
    def test_convolution_trace_and_film(self):
        g = Grid(4, 4, 2, 1.0, 1.0, 0.5)
        kernel = build_demag_kernel(g)
        rng = np.random.default_rng(88)
        m = rng.standard_normal((3,) + g.shape)
        hs = demag_field(kernel, m)
        direct = np.zeros_like(m)
        comps = ("xx", "xy", "xz", "yy", "yz", "zz")
        cells = list(itertools.product(range(4), range(4), range(2)))
        for (i, j, k) in cells:
            for (p, q, r) in cells:
                off = ((i - p) * g.hx, (j - q) * g.hy, (k - r) * g.hz)
                t = {c: demag_tensor_entry(c, *off, g.spacing) for c in comps}
                N = np.array([[t["xx"], t["xy"], t["xz"]],
                              [t["xy"], t["yy"], t["yz"]],
                              [t["xz"], t["yz"], t["zz"]]])
                direct[:, i, j, k] -= N @ m[:, p, q, r]
        conv_err = np.abs(hs - direct).max()
        trace_err = abs(kernel.self_trace - 1.0)

        film = Grid(32, 32, 1, 1.0, 1.0, 0.01)
        fk = build_demag_kernel(film)
        mz = np.zeros((3,) + film.shape)
        mz[2] = 1.0
        center = demag_field(fk, mz)[2, 16, 16, 0]
        film_ok = abs(center + 1.0) < 0.05

        ok = conv_err <= 1e-10 and trace_err <= 1e-8 and film_ok
        record_acceptance("criterion 8: demag convolution vs direct sum "
                          "(1e-10); trace 1 (1e-8); film field within 5%", ok,
                          f"conv {conv_err:.2e}, trace err {trace_err:.2e}, "
                          f"film h_z={center:.3f}")
        assert ok


class TestCriterion09ProjectionInvariant:
    def test_unit_length_everywhere(self):
        if not UNIT_DEVIATIONS:
            # standalone fallback: short runs of every scheme
            case = case_1d(alpha=0.1)
            grid = Grid.line(20)
            params = MaterialParams(eps=1.0, alpha=0.1)
            m0 = sample_vector(grid, lambda X, Y, Z: case.exact(X, Y, Z, 0.0))
            for scheme in ("gspm1", "si2", "scheme-a", "scheme-b", "bdf2-ref"):
                res = integrate(scheme, m0, grid, params, 1e-3, 50,
                                source=case.source)
                UNIT_DEVIATIONS.append(res.max_unit_deviation)
        worst = max(UNIT_DEVIATIONS)
        ok = worst <= 4 * EPS64
        record_acceptance("criterion 9: post-step | |m| - 1 | <= 4 eps in "
                          "every run above", ok,
                          f"worst {worst:.2e} over {len(UNIT_DEVIATIONS)} runs")
        assert ok


class TestCriterion10ThinFilmStability:
    @pytest.mark.parametrize("alpha", [0.1, 0.01])
    def test_two_nanoseconds_with_energy_decay(self, alpha):
        cfg = ExperimentConfig.from_dict({
            "kind": "micromag", "alpha": alpha, "grid": [64, 64, 3],
            "dt_seconds": 1.0e-12, "t_final_seconds": 2.0e-9,
            "snapshot_every": 500,
        })
        record = run_experiment(cfg)
        e0 = record.summary["initial_energy"]
        eT = record.summary["terminal_energy"]
        dev = record.summary["max_unit_deviation"]
        UNIT_DEVIATIONS.append(dev)
        ok = eT < e0 and dev <= 4 * EPS64
        record_acceptance(f"criterion 10: thin film 2 ns at alpha={alpha}, "
                          "once-per-step stray field", ok,
                          f"E0={e0:.4e} -> ET={eT:.4e}, max dev {dev:.1e}")
        assert ok


class TestCriterion11SolveCounts:
    def test_exact_solve_budgets(self):
        grid = Grid.line(16)
        plan = build_plan(grid)
        params = MaterialParams(eps=1.0, alpha=0.02)
        rng = np.random.default_rng(3)
        m = rng.standard_normal((3,) + grid.shape)
        m /= np.sqrt((m * m).sum(axis=0))
        st = gspm1_step(SchemeState.from_initial(m), params, plan, 1e-4)

        before = plan.solve_count
        scheme_a_step(st, params, plan, 1e-4)
        count_a = plan.solve_count - before

        stb = scheme_b_init(st, params, plan, 1e-4)
        before = plan.solve_count
        scheme_b_step(stb, params, plan, 1e-4)
        count_b = plan.solve_count - before

        ok = count_a == 5 and count_b == 3
        record_acceptance("criterion 11: five-solve scheme uses exactly 5 "
                          "solves per step, three-solve exactly 3", ok,
                          f"counts: {count_a} and {count_b}")
        assert ok
