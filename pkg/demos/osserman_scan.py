"""
Sampled Osserman test
=====================

A metric is pointwise Osserman when the Jacobi spectrum of a unit vector
does not depend on the vector.  Here the unit sphere of each tangent space
of TM is sampled with 60 directions (antipodal classes of the 600-cell
vertices) and the spread of sorted spectra is reported.
"""

from __future__ import annotations

from gnatlab import BundlePoint, cheeger_gromoll, flat_chart, osserman_test, sasaki, sphere_chart

# %%
# Flat base: the Sasaki metric is flat, so every spectrum is zero.

flat = flat_chart()
pts = [BundlePoint.with_norm(flat, [0.0, 0.0], [1.0, 0.0], t) for t in (0.0, 1.0, 4.0)]
rep = osserman_test(sasaki(), flat, pts)
print("flat + Sasaki:", rep.global_)

# %%
# Round sphere: the spectrum depends on the direction and on t.

sphere = sphere_chart(1.0)
pts = [BundlePoint.with_norm(sphere, [1.1, 0.3], [1.0, 0.0], t) for t in (0.0, 1.0, 4.0)]
for gen in (sasaki(), cheeger_gromoll()):
    rep = osserman_test(gen, sphere, pts)
    print(f"sphere + {gen.name}: pointwise={rep.pointwise.is_osserman}, "
          f"spread per point = {rep.point_spreads.round(4).tolist()}")
