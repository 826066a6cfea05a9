"""Distance distributions on three-dimensional lens spaces.

Closed-form moments, moment-generating function, pdf/cdf/quantile, and ball
volumes on the homogeneous spaces L(n;1), cross-validated by a reproducible
Monte Carlo engine that samples Haar-random points and computes orbit-minimum
distances on arbitrary L(n;m).
"""

from .analytic import (
    DistributionSpec,
    MomentResult,
    ball_volume,
    cdf,
    mgf,
    moment,
    moment_asymptotic,
    moment_closed_form,
    moment_finite_sum,
    moment_large_n_limit,
    moment_negative_one,
    moment_quadrature,
    moment_recurrence,
    pdf,
    quantile,
    sphere_area,
)
from .geometry import (
    JoinCoordinates,
    LensSpace,
    SpherePoint,
    eigenvalue_distance,
    from_join,
    group_action,
    lens_distance,
    sphere_distance,
    to_join,
)
from .montecarlo import (
    DistanceHistogram,
    EstimateResult,
    KsResult,
    SampleConfig,
    build_histogram,
    fixed_point_distances,
    haar_points,
    ks_statistic,
    ks_two_sample,
    rand_sphere_point,
    rand_su2,
    sample_distances,
)
from .specfun import (
    HypergeometricParams,
    cos_integral,
    euler_gamma,
    hyp_1f2,
    hyp_pfq,
    pochhammer,
    sin_integral,
)

__version__ = "0.1.0"
