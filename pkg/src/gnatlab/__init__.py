"""Curvature of g-natural metrics on tangent bundles of surfaces.

The main entry points::

    from gnatlab import sphere_chart, sasaki, BundlePoint, bundle_curvature
    chart = sphere_chart(1.0)
    p = BundlePoint.with_norm(chart, [1.0, 0.3], [1.0, 0.0], t=2.0)
    pack = bundle_curvature(sasaki(), chart, p)
"""

from __future__ import annotations

__version__ = "0.1.0"

from .base_geometry import (
    DomainError,
    MetricChart,
    MetricError,
    base_jacobi,
    chart_preset,
    christoffel,
    curvature_pack,
    custom_chart,
    eval_metric,
    flat_chart,
    gauss_curvature,
    hyperbolic_chart,
    riemann,
    rotation_i,
    sphere_chart,
)
from .bundle_curvature import (
    BundleCurvaturePack,
    JacobiMatrix,
    bundle_christoffel,
    bundle_curvature,
    bundle_jacobi,
    bundle_riemann,
    covariant_derivative_lifted,
    totally_geodesic_residual,
)
from .bundle_metric import (
    BundlePoint,
    DegenerateMetricError,
    LiftedVector,
    bundle_metric_matrix,
    lift_frame,
    lift_gram,
    lifted_inner,
    metric_on_lifts,
    special_vectors,
    zero_section_normal_basis,
)
from .generators import (
    GeneratorError,
    GeneratorSet,
    RationalCurve,
    cheeger_gromoll,
    classify,
    derived_scalars,
    preset,
    sasaki,
)
from .jacobi_osserman import (
    FrameBasis,
    SpectrumReport,
    base_embedding_check,
    frame_lifted_u,
    frame_zero_section,
    frame_orthonormal,
    entry_identities,
    jacobi_in_frame,
    osserman_test,
    zero_section_pattern_check,
    spectrum,
    closed_form_spectrum,
    zero_section_spectrum,
    zero_section_vertical_matrix_pattern,
)
