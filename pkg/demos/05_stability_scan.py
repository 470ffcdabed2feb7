"""Largest stable time step of the three-solve scheme: the 0.25 h^2 law.

Bisects the blow-up threshold of the conditionally stable three-solve scheme
on the sourced 1D problem at alpha = 1, and probes the five-solve scheme far
beyond any parabolic limit. The h = 0.01 row integrates to T = 1 at steps
near 2.5e-5, so allow a couple of minutes.
"""

import sys

from gspm2 import case_1d, classify_stability, stability_scan

case = case_1d(alpha=1.0)
h_list = [0.1] if "--quick" in sys.argv else [0.1, 0.01]

report = stability_scan("scheme-b", case, h_list, rounds=6)
print("three-solve scheme (conditionally stable):")
for row in report.rows:
    print(f"  h={row.h:<6g} largest stable dt ~ {row.dt_stable:.2e} "
          f"(0.25 h^2 = {0.25 * row.h**2:.2e}; bracket "
          f"[{row.bracket[0]:.2e}, {row.bracket[1]:.2e}], {len(row.probes)} probes)")

print("five-solve scheme at h=0.01, far above any parabolic limit:")
for dt in (1e-3, 1e-2, 1e-1):
    ok = classify_stability("scheme-a", case, 0.01, dt, t_final=1.0)
    print(f"  dt={dt:.0e}: {'stable' if ok else 'unstable'}")
