"""Temporal convergence of the two Gauss-Seidel schemes on the sourced 1D test.

Reproduces the 1D temporal study: exact solution built from the bump phase
x^2 (1-x)^2, source term chosen so the exact solution solves the damped
dynamics, errors measured at T in both norms. A coarser grid than the
benchmark's 1e-4 spacing keeps the demo fast; pass --full for the benchmark
grid.

Note the measured inf-norm orders land near 1.5 rather than 2: the exact
solution's third derivative does not vanish at the walls, which the
biharmonic-regularized auxiliary solves answer with an O(sqrt(dt)) boundary
layer. See notes in the README about this benchmark.
"""

import sys

from gspm2 import case_1d, run_time_convergence

full = "--full" in sys.argv
dx = 1e-4 if full else 5e-4
T = 0.3
case = case_1d(alpha=0.01)

for scheme in ("scheme-a", "scheme-b"):
    rep = run_time_convergence(scheme, case, dx=dx,
                               dt_list=[T / 200, T / 300, T / 400, T / 500],
                               t_final=T)
    print(f"{scheme} (dx={dx:g}):")
    for dt, e_inf, e_l2 in rep.points:
        print(f"  dt={dt:.3e}  err_inf={e_inf:.4e}  err_l2={e_l2:.4e}")
    print(f"  fitted order: inf {rep.order_inf:.2f}, l2 {rep.order_l2:.2f}")
