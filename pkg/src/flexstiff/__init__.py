"""In-plane stiffness of serpentine-spring suspensions and cross-axis coupling analysis."""

from ._kernels import BACKEND
from .analysis import (
    CouplingMetrics,
    ResponseCurve,
    SweepResult,
    SweepSpec,
    coupling_metrics,
    response_curve,
    run_sweep,
    solve_response,
)
from .castigliano import (
    DisplacementVector,
    InPlaneMatrix,
    LoadVector,
    MatrixKind,
    MomentField,
    SpringConstants,
    compliance_matrix,
    moment_field,
    spring_constants,
    stiffness_matrix,
)
from .errors import SingularCompliance, SingularSystem, ValidationError
from .geometry import (
    BeamPath,
    CrossSection,
    PlanarTransform,
    Point2,
    RssParams,
    Segment,
    SpringVariant,
    build_rss_path,
    mirror_x,
    path_extents,
    transform,
)
from .suspension import (
    LayoutKind,
    Provenance,
    SuspensionGeometry,
    SuspensionModel,
    SuspensionStiffness,
    assemble_rigid_body,
    assemble_table1,
    build_suspension,
)

__version__ = "0.1.0"
