"""assetforge: simulation-ready asset pipeline.

Raw object meshes go in; scaled, captioned, grasp-verified asset
records come out, together with tabletop layouts, grounded question
answer pairs, and a human review service over the results.
"""

from .errors import (
    DegenerateMeshError,
    ManifestParseError,
    MeshParseError,
    PlacementInfeasibleError,
    StatsIntegrityError,
    TransportError,
    ValidationError,
)
from .model import (
    AssetRecord,
    DEFAULT_GRIPPER,
    FunctionalPoint,
    GraspPoint,
    GraspPose,
    GripperModel,
    OrientedBoundingBox,
    PhysicalProperties,
    PipelineStats,
    PlacementAnnotation,
    PointCloud,
    ReviewVerdict,
    SemanticCaption,
    StageEvent,
    TriMesh,
    VerificationOutcome,
)

__version__ = "0.1.0"

__all__ = [
    "AssetRecord",
    "DEFAULT_GRIPPER",
    "DegenerateMeshError",
    "FunctionalPoint",
    "GraspPoint",
    "GraspPose",
    "GripperModel",
    "ManifestParseError",
    "MeshParseError",
    "OrientedBoundingBox",
    "PhysicalProperties",
    "PipelineStats",
    "PlacementAnnotation",
    "PlacementInfeasibleError",
    "PointCloud",
    "ReviewVerdict",
    "SemanticCaption",
    "StageEvent",
    "StatsIntegrityError",
    "TransportError",
    "TriMesh",
    "ValidationError",
    "VerificationOutcome",
    "__version__",
]
