"""Two-view triangulation: alternative midpoint methods, baselines, metrics and a benchmark."""
from .baselines import (
    ClosestPair,
    closest_points_skew,
    depths_classic,
    dlt_batch,
    linls_batch,
    mid_batch,
    refine_l2,
    refine_l2_batch,
    triangulate_dlt,
    triangulate_linls,
    triangulate_mid_classic,
)
from .geometry import (
    DegenerateRays,
    DegenerateWeights,
    Intrinsics,
    Line3D,
    ObservationPair,
    RelativePose,
    SolveFailure,
    angle_between_lines,
    backproject,
    epipolar_residual,
    transform_to_frame0,
)
from .metrics import (
    ErrorRecord,
    error_3d,
    error_record,
    norm_aggregate,
    parallax_error,
    parallax_estimate,
    raw_parallax,
    relative_impact,
    reprojection_errors,
)
from .midpoint import (
    BatchResult,
    CrossTriple,
    DepthPair,
    TriangulationResult,
    adequacy_test,
    cross_triple,
    depths_alt,
    mid2_batch,
    triangulate_mid2,
    triangulate_wmid2,
    wmid2_batch,
)

__version__ = "0.1.0"
