"""Computational geometry of normed spaces: bisectors, multilateration and resolving sets."""

from .bisector import (
    Bisector,
    FlatRayCone,
    RegionBounds,
    SlabFit,
    flat_ray_cone,
    line_intersect,
    membership,
    reflection_isometry_check,
    region_bounds,
    slab_fit,
)
from .errors import (
    DegenerateAnchors,
    DegenerateInput,
    DimensionMismatch,
    InvalidNorm,
    MinkresError,
    NoSignPattern,
    NoSolution,
    NormIsEuclidean,
    NormIsStrictlyConvex,
    NotStrictlyConvex,
)
from .gauss import GaussFit, GaussSample, ProjectivePoint, classify_norm, fit_linear, gauss_map, line_preservation_test
from .norms import (
    FlatSegment,
    NormSpec,
    SupportContact,
    eval_norm,
    flat_segment_parallel_to,
    load_norm,
    parallelogram_defect,
    sphere_point,
    strict_convexity_probe,
    support_contact,
)
from .resolve import (
    AnchorSet,
    CounterexampleCertificate,
    DistanceVector,
    RegionGraph,
    ResolutionReport,
    counterexample,
    distances_from,
    graph_linearity_test,
    hull_membership,
    is_resolving_for_hull,
    lift_to_dimension,
    multilaterate,
    region_graph,
    srs2_counterexample,
    srs3_counterexample,
    verify_certificate,
)

__version__ = "0.1.0"
