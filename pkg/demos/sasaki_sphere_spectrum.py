"""
Jacobi spectra along the geodesic flow on the sphere
====================================================

On the unit sphere the Jacobi operator of the geodesic flow vector ``u^h``
is diagonal in the basis ``(u^h, (iu)^h, u^v, (iu)^v)``.  For the Sasaki
metric the two non-zero entries are ``t (1 - 3t/4)`` and ``t^2 / 4``, with
``t = g(u, u)``.  This script prints both metrics side by side.
"""

from __future__ import annotations

import numpy as np

from gnatlab import BundlePoint, LiftedVector, bundle_curvature, cheeger_gromoll, sasaki, sphere_chart
from gnatlab.jacobi_osserman import frame_lifted_u

chart = sphere_chart(1.0)
x = np.array([1.1, 0.3])

# %%
# Matrix entries along the fibre
# ------------------------------
# J22 and J44 are the only non-zero entries for these two metrics.

print(f"{'t':>6} {'sasaki J22':>12} {'sasaki J44':>12} {'CG J22':>10} {'CG J44':>10}")
for t in (0.25, 0.5, 1.0, 2.0, 4.0, 8.0):
    p = BundlePoint.with_norm(chart, x, [1.0, 0.0], t)
    basis = frame_lifted_u(chart, p)
    xi = LiftedVector.horizontal(p.u)
    row = [t]
    for gen in (sasaki(), cheeger_gromoll()):
        M = bundle_curvature(gen, chart, p).jacobi(xi, basis).matrix
        row += [M[1, 1], M[3, 3]]
    print("{:6.2f} {:12.6f} {:12.6f} {:10.6f} {:10.6f}".format(*row))

# %%
# Closed form for Sasaki
# ----------------------
# Compare with t (1 - 3t/4) and t^2/4.

for t in (0.5, 2.0):
    print(f"t={t}: expected J22={t * (1 - 0.75 * t):.6f}, J44={t * t / 4:.6f}")
