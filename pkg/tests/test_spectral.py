import numpy as np
import pytest

from gspm2.mesh import Grid, laplacian
from gspm2.spectral import (build_plan, dense_operator_matrix,
                            laplacian_eigenvalues, solve, solve_dense_oracle)


class TestEigenvalues:
    def test_two_cells_unit_spacing(self):
        assert np.allclose(laplacian_eigenvalues(2, 1.0), [0.0, -2.0])

    def test_degenerate_axis(self):
        assert np.allclose(laplacian_eigenvalues(1, 0.3), [0.0])

    def test_four_cells_quarter_spacing(self):
        lam = laplacian_eigenvalues(4, 0.25)
        expected = -64.0 * np.sin(np.pi * np.arange(4) / 8.0) ** 2
        assert np.abs(lam - expected).max() < 1e-12

    @pytest.mark.parametrize("n", [2, 3, 5, 8])
    def test_match_dense_spectrum(self, n):
        g = Grid.line(n, lx=0.7 * n)
        # dense Laplacian recovered from the operator with a=1, b=0
        L = np.eye(g.n_cells) - dense_operator_matrix(g, 1.0, 0.0)
        got = np.sort(np.linalg.eigvalsh(L))
        want = np.sort(laplacian_eigenvalues(n, g.hx))
        assert np.abs(got - want).max() < 1e-12 * max(1.0, abs(want).max())

    def test_nonpositive(self):
        plan = build_plan(Grid(5, 4, 3, 1.0, 1.0, 1.0))
        assert plan.lam.max() <= 0.0
        assert plan.lam_x[0] == 0.0 and plan.lam_y[0] == 0.0 and plan.lam_z[0] == 0.0


class TestTransform:
    def test_round_trip(self):
        plan = build_plan(Grid(6, 5, 1, 1.0, 0.8, 1.0))
        rng = np.random.default_rng(0)
        u = rng.standard_normal(plan.grid.shape)
        v = plan.inverse(plan.forward(u))
        assert np.abs(v - u).max() < 1e-13 * max(1.0, np.abs(u).max())

    def test_forward_diagonalizes_laplacian(self):
        g = Grid(8, 1, 1, 1.0, 1.0, 1.0)
        plan = build_plan(g)
        rng = np.random.default_rng(1)
        u = rng.standard_normal(g.shape)
        lhs = plan.forward(laplacian(g, u))
        rhs = plan.lam * plan.forward(u)
        assert np.abs(lhs - rhs).max() < 1e-11


class TestSolve:
    def test_identity_coefficients(self):
        plan = build_plan(Grid(4, 4, 1, 1.0, 1.0, 1.0))
        rng = np.random.default_rng(2)
        f = rng.standard_normal(plan.grid.shape)
        assert np.abs(solve(plan, f, 0.0, 0.0) - f).max() < 1e-13

    def test_constant_passthrough(self):
        plan = build_plan(Grid(4, 4, 2, 1.0, 1.0, 1.0))
        f = np.full(plan.grid.shape, 2.5)
        u = solve(plan, f, 0.7, 0.2)
        assert np.abs(u - f).max() < 1e-12

    def test_against_dense_lu(self):
        g = Grid(4, 4, 1, 1.0, 1.0, 1.0)
        plan = build_plan(g)
        rng = np.random.default_rng(3)
        f = rng.standard_normal(g.shape)
        u = solve(plan, f, 0.3, 0.09)
        w = solve_dense_oracle(g, f, 0.3, 0.09)
        assert np.abs(u - w).max() < 1e-11

    def test_heat_solve_b_zero(self):
        g = Grid.line(7, lx=0.5)
        plan = build_plan(g)
        rng = np.random.default_rng(4)
        f = rng.standard_normal(g.shape)
        u = solve(plan, f, 0.02)
        w = solve_dense_oracle(g, f, 0.02, 0.0)
        assert np.abs(u - w).max() < 1e-12

    def test_linearity(self):
        plan = build_plan(Grid(5, 3, 2, 1.0, 1.0, 1.0))
        rng = np.random.default_rng(5)
        f, gf = rng.standard_normal((2,) + plan.grid.shape)
        lhs = solve(plan, 2.0 * f - 3.0 * gf, 0.1, 0.01)
        rhs = 2.0 * solve(plan, f, 0.1, 0.01) - 3.0 * solve(plan, gf, 0.1, 0.01)
        assert np.abs(lhs - rhs).max() < 1e-12

    def test_rejects_bad_coefficients(self):
        plan = build_plan(Grid.line(4))
        f = np.zeros(plan.grid.shape)
        for a, b in [(-0.1, 0.0), (0.1, -1.0), (np.nan, 0.0), (0.0, np.inf)]:
            with pytest.raises(ValueError):
                solve(plan, f, a, b)

    def test_solve_count_increments(self):
        plan = build_plan(Grid.line(4))
        f = np.zeros(plan.grid.shape)
        before = plan.solve_count
        solve(plan, f, 0.1, 0.01)
        solve(plan, f, 0.0, 0.0)
        assert plan.solve_count == before + 2


class TestDenseOracle:
    def test_operator_matrix_symmetric(self):
        g = Grid(3, 3, 2, 1.0, 1.2, 0.9)
        A = dense_operator_matrix(g, 0.4, 0.16)
        assert np.abs(A - A.T).max() < 1e-12 * np.abs(A).max()

    def test_size_cap(self):
        g = Grid(17, 16, 16, 1.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            dense_operator_matrix(g, 0.1)

    def test_randomized_agreement_sweep(self):
        # mutual consistency of the spectral and dense paths on random shapes;
        # coefficients stay in the integrators' range so the dense oracle's
        # own conditioning does not dominate the comparison
        rng = np.random.default_rng(42)
        for _ in range(25):
            shape = rng.integers(1, 9, size=3)
            g = Grid(int(shape[0]), int(shape[1]), int(shape[2]),
                     *(float(v) for v in rng.uniform(0.8, 2.0, size=3)))
            a = float(rng.uniform(0.0, 0.5))
            b = a * a
            f = rng.standard_normal(g.shape)
            u = solve(build_plan(g), f, a, b)
            w = solve_dense_oracle(g, f, a, b)
            denom = max(1.0, np.abs(w).max())
            assert np.abs(u - w).max() / denom < 1e-10
