"""Geodesic gradient attributions for scalar fields on curved spaces.

The package computes per-direction attributions by integrating the field's
differential against parallel-transported frame directions along the
minimising geodesic between an explained point and a base point.  On flat
space with straight lines this reduces to the classic integrated-gradients
construction, and the certification harness checks that together with the
other expected properties (linearity, sensitivity, completeness, invariance
under isometries, the eigenvalue bound) numerically.
"""

from .attribution import (
    DEFAULT_QUADRATURE,
    METHOD_EIGEN_RIG,
    METHOD_GENERIC_BAM,
    METHOD_IG,
    METHOD_RIG,
    AttributionMatrix,
    AttributionReport,
    BoundCheckReport,
    EigenAttribution,
    PathDiagnostics,
    attribution_bound_check,
    attribution_matrix,
    bam_along_curve,
    eigen_attributions,
    eigen_rig,
    generic_bam_report,
    ig,
    rig,
    symmetrize,
)
from .axioms import (
    AXIOMS,
    DEFAULT_SEED,
    AxiomCheckSpec,
    AxiomReport,
    default_suite,
    run_check,
    run_suite,
    suite_from_dict,
)
from .errors import (
    CutLocusAmbiguity,
    DimensionMismatch,
    EigenSolverFailure,
    InvalidCurve,
    InvalidIsometry,
    InvalidPoint,
    InvalidTangent,
    ParseError,
    QuadratureNotConverged,
    RigradError,
    WrongManifold,
)
from .fields import (
    AffineField,
    CombinedField,
    ComposedWithIsometry,
    CoordinateField,
    GaussianBumpField,
    LayerSpec,
    LogHeightField,
    MLPField,
    MLPWeights,
    PushforwardField,
    ScalarField,
    insert_identity_layer,
    linear_combination,
    mlp_from_dict,
    mlp_from_file,
    mlp_to_dict,
    mlp_to_file,
    permute_hidden_units,
    random_mlp,
    swap_input_columns,
)
from .manifolds import (
    Curve,
    Euclidean,
    EuclideanMotion,
    HalfPlane2,
    Isometry,
    Manifold,
    MoebiusMap,
    OrthonormalFrame,
    Point,
    Sphere2,
    SphereRotation,
    TangentVector,
    constant_speed_defect,
    coordinate_swap,
    geodesic_residual,
    make_manifold,
    manifold_from_dict,
    manifold_from_file,
    manifold_to_dict,
    ode_transport,
    random_isometry,
    shoot_geodesic,
    transport_along,
)
from .quadrature import Quadrature, nodes_weights

__version__ = "0.1.0"

__all__ = [
    "AXIOMS",
    "AffineField",
    "AttributionMatrix",
    "AttributionReport",
    "AxiomCheckSpec",
    "AxiomReport",
    "BoundCheckReport",
    "CombinedField",
    "ComposedWithIsometry",
    "CoordinateField",
    "Curve",
    "CutLocusAmbiguity",
    "DEFAULT_QUADRATURE",
    "DEFAULT_SEED",
    "DimensionMismatch",
    "EigenAttribution",
    "EigenSolverFailure",
    "Euclidean",
    "EuclideanMotion",
    "GaussianBumpField",
    "HalfPlane2",
    "InvalidCurve",
    "InvalidIsometry",
    "InvalidPoint",
    "InvalidTangent",
    "Isometry",
    "LayerSpec",
    "LogHeightField",
    "METHOD_EIGEN_RIG",
    "METHOD_GENERIC_BAM",
    "METHOD_IG",
    "METHOD_RIG",
    "MLPField",
    "MLPWeights",
    "Manifold",
    "MoebiusMap",
    "OrthonormalFrame",
    "ParseError",
    "PathDiagnostics",
    "Point",
    "PushforwardField",
    "Quadrature",
    "QuadratureNotConverged",
    "RigradError",
    "ScalarField",
    "Sphere2",
    "SphereRotation",
    "TangentVector",
    "WrongManifold",
    "attribution_bound_check",
    "attribution_matrix",
    "bam_along_curve",
    "constant_speed_defect",
    "coordinate_swap",
    "default_suite",
    "eigen_attributions",
    "eigen_rig",
    "generic_bam_report",
    "geodesic_residual",
    "ig",
    "insert_identity_layer",
    "linear_combination",
    "make_manifold",
    "manifold_from_dict",
    "manifold_from_file",
    "manifold_to_dict",
    "mlp_from_dict",
    "mlp_from_file",
    "mlp_to_dict",
    "mlp_to_file",
    "nodes_weights",
    "ode_transport",
    "permute_hidden_units",
    "random_isometry",
    "random_mlp",
    "rig",
    "run_check",
    "run_suite",
    "shoot_geodesic",
    "suite_from_dict",
    "swap_input_columns",
    "symmetrize",
    "transport_along",
]
