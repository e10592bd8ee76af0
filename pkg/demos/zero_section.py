"""
The zero section of (TM, G)
===========================

The zero section ``x -> (x, 0)`` is totally geodesic for every g-natural
metric, and the Jacobi operator of a horizontal lift there is triangular in
the basis ``(H^h, (iH)^h, H^v, (iH)^v)``.  Its spectrum contains ``0`` and
``k / (alpha1 + alpha3)(0)``.
"""

from __future__ import annotations

import numpy as np

from gnatlab import (
    cheeger_gromoll,
    hyperbolic_chart,
    sasaki,
    sphere_chart,
    totally_geodesic_residual,
    zero_section_spectrum,
)
from gnatlab.jacobi_osserman import zero_section_pattern_check

# %%
# Structure of the Jacobi matrix
# ------------------------------

for chart, x in ((sphere_chart(2.0), [1.0, 0.5]), (hyperbolic_chart(), [0.2, 1.4])):
    for gen in (sasaki(), cheeger_gromoll()):
        chk = zero_section_pattern_check(gen, chart, x, [1.0, 0.0])
        print(f"{chart.name:>10} {gen.name:>16}  off-pattern {chk['off_pattern']:.1e}  "
              f"k/(a1+a3)(0) = {chk['k_over_alpha13']:+.4f}")
        print(np.array2string(chk["matrix"], precision=4, suppress_small=True))

# %%
# Spectrum and the totally geodesic property
# ------------------------------------------

chart = sphere_chart(1.0)
rep = zero_section_spectrum(sasaki(), chart, [1.0, 0.5], [0.3, 1.0])
print("unit sphere, Sasaki:", np.round(rep.eigenvalues, 12))
res = totally_geodesic_residual(cheeger_gromoll(), chart, [1.0, 0.5], [1.0, 0.0], [0.2, 0.7])
print(f"second fundamental form residual (Cheeger-Gromoll): {res:.1e}")
