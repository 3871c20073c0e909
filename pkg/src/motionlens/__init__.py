"""motionlens: compare sets of 3D character animations.

Load BVH / Clip-JSON files into an AnimationSet, then analyse it:
pose clustering over time, keyposes, joint paths and collisions,
screen-space joint curves and per-frame diffs. The server module
exposes the same analyses over HTTP for the browser studio.
"""

from .camera import (
    CameraSpec,
    ClipCurve,
    DiffFrame,
    JointCurves,
    ProjectedSample,
    diff_frames,
    joint_curves,
    project,
)
from .config import (
    CLUSTER_PALETTE,
    DEFAULT_FPS,
    DEFAULT_K_MAX,
    DEFAULT_K_MIN,
    DEFAULT_KEYPOSE_K,
    DEFAULT_MEDIAN_WINDOW,
    DEFAULT_TRACE_N,
)
from .core import (
    AnimationClip,
    GlobalPose,
    Skeleton,
    clip_features,
    clip_poses,
    forward_kinematics,
    heading_angle,
    pose_feature,
    resample,
)
from .errors import (
    EmptySession,
    FrameOutOfRange,
    IncompatibleSkeletons,
    MotionLensError,
    NotFound,
    ObjectDegenerate,
    ParseError,
    ValidationError,
)
from .io import AnimationSet, emit_clip_json, load_animation_set, parse_bvh, parse_clip_json
from .scene import SceneObject
from .session import (
    ClipRow,
    ComparisonBundle,
    LensConfig,
    Session,
    TimelineState,
    active_frames,
    tick,
    timeline_extent,
)
from .spatial import (
    CollisionEvent,
    JointPath,
    KeyposeSet,
    extract_keyposes,
    joint_path,
    path_collisions,
    reconstruction_error,
    trace_window,
)
from .temporal import (
    DtwResult,
    PoseClustering,
    Segment,
    cluster_poses,
    dba_average,
    dtw,
    xmeans,
)

__version__ = "0.1.0"

__all__ = [
    "AnimationClip",
    "AnimationSet",
    "CameraSpec",
    "ClipCurve",
    "ClipRow",
    "CollisionEvent",
    "ComparisonBundle",
    "DiffFrame",
    "DtwResult",
    "GlobalPose",
    "JointCurves",
    "JointPath",
    "KeyposeSet",
    "LensConfig",
    "PoseClustering",
    "ProjectedSample",
    "SceneObject",
    "Segment",
    "Session",
    "Skeleton",
    "TimelineState",
    "MotionLensError",
    "ParseError",
    "ValidationError",
    "NotFound",
    "FrameOutOfRange",
    "IncompatibleSkeletons",
    "EmptySession",
    "ObjectDegenerate",
    "CLUSTER_PALETTE",
    "DEFAULT_FPS",
    "DEFAULT_TRACE_N",
    "DEFAULT_KEYPOSE_K",
    "DEFAULT_K_MIN",
    "DEFAULT_K_MAX",
    "DEFAULT_MEDIAN_WINDOW",
    "active_frames",
    "clip_features",
    "clip_poses",
    "cluster_poses",
    "dba_average",
    "diff_frames",
    "dtw",
    "emit_clip_json",
    "extract_keyposes",
    "forward_kinematics",
    "heading_angle",
    "joint_curves",
    "joint_path",
    "load_animation_set",
    "parse_bvh",
    "parse_clip_json",
    "path_collisions",
    "pose_feature",
    "project",
    "reconstruction_error",
    "resample",
    "tick",
    "timeline_extent",
    "trace_window",
    "xmeans",
]
