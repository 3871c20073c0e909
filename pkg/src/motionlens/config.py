"""Shared defaults and the cluster colour palette."""

DEFAULT_FPS = 24

# Lens defaults.
DEFAULT_TRACE_N = 10
DEFAULT_KEYPOSE_K = 15
DEFAULT_K_MIN = 1
DEFAULT_K_MAX = 16
DEFAULT_MEDIAN_WINDOW = 1

# Colours assigned to pose clusters, indexed by cluster id after the ids
# have been relabelled in order of first appearance. 16 entries, matching
# the largest cluster count the pose-clustering search will accept.
CLUSTER_PALETTE = (
    "#4e79a7",
    "#f28e2b",
    "#e15759",
    "#76b7b2",
    "#59a14f",
    "#edc948",
    "#b07aa1",
    "#ff9da7",
    "#9c755f",
    "#bab0ac",
    "#86bcb6",
    "#d37295",
    "#fabfd2",
    "#8cd17d",
    "#499894",
    "#d4a6c8",
)
