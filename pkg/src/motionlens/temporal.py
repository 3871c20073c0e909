"""Timeline analysis: DTW alignment, sequence averaging, pose clustering.

The whole-set pose overview works in three stages: average all clips
into one representative feature sequence (DBA), find how many distinct
pose groups that average contains (x-means over its frames), then
cluster every frame of every clip with k-means seeded at those group
centroids. The resulting per-frame labels are run-length encoded into
colour segments for the timeline.
"""

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import median_filter
from scipy.spatial.distance import cdist

from .config import DEFAULT_K_MAX, DEFAULT_K_MIN, DEFAULT_MEDIAN_WINDOW
from .core import clip_features
from .errors import EmptySession, ValidationError

DBA_MAX_ITER = 30
DBA_TOL = 1e-6
KMEANS_MAX_ITER = 100


@dataclass(frozen=True, eq=False)
class DtwResult:
    """Optimal monotone alignment between two feature sequences.

    path is a list of (i, j) pairs from (0, 0) to (Ta-1, Tb-1); cost is
    the sum of pointwise Euclidean distances along it.
    """

    cost: float
    path: tuple


@dataclass(frozen=True, eq=False)
class Segment:
    """Run of consecutive frames sharing one cluster, end exclusive."""

    cluster_id: int
    start: int
    end: int


@dataclass(frozen=True, eq=False)
class PoseClustering:
    """Pose-group decomposition of an animation set.

    labels holds one int array per clip (a cluster id per frame);
    segments holds the matching run-length encoding. Cluster ids are
    numbered by first appearance scanning clip 0, then clip 1, ... so
    colours stay stable across runs with the same seed.
    """

    n_clusters: int
    centroids: np.ndarray
    labels: tuple
    segments: tuple
    seed: int


def dtw(a, b):
    """Align two feature sequences with dynamic time warping.

    Pointwise distance is Euclidean. Among equal-cost predecessors the
    backtrack prefers the diagonal step, then advancing a, then
    advancing b.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    if a.shape[0] == 0 or b.shape[0] == 0:
        raise ValidationError("dtw needs non-empty sequences")
    if a.shape[1] != b.shape[1]:
        raise ValidationError(f"feature dimensions differ: {a.shape[1]} vs {b.shape[1]}")
    cost, path = _dtw_core(cdist(a, b))
    return DtwResult(cost=cost, path=path)


def _dtw_core(dist):
    """DP + backtrack over a precomputed local-cost matrix."""
    ta, tb = dist.shape

    # accumulated-cost DP, kept as lists of rows for fast scalar access
    rows = dist.tolist()
    acc = [[0.0] * tb for _ in range(ta)]
    first = rows[0]
    running = 0.0
    for j in range(tb):
        running += first[j]
        acc[0][j] = running
    for i in range(1, ta):
        row = rows[i]
        prev = acc[i - 1]
        cur = acc[i]
        cur[0] = prev[0] + row[0]
        for j in range(1, tb):
            diag = prev[j - 1]
            up = prev[j]
            left = cur[j - 1]
            best = diag
            if up < best:
                best = up
            if left < best:
                best = left
            cur[j] = row[j] + best

    i, j = ta - 1, tb - 1
    path = [(i, j)]
    while i > 0 or j > 0:
        if i == 0:
            j -= 1
        elif j == 0:
            i -= 1
        else:
            diag = acc[i - 1][j - 1]
            up = acc[i - 1][j]
            left = acc[i][j - 1]
            best = min(diag, up, left)
            if diag == best:
                i -= 1
                j -= 1
            elif up == best:
                i -= 1
            else:
                j -= 1
        path.append((i, j))
    path.reverse()
    return float(acc[ta - 1][tb - 1]), tuple(path)


def dba_average(sequences, seed=0, max_iter=DBA_MAX_ITER, tol=DBA_TOL, return_costs=False):
    """Average feature sequences under DTW alignment.

    Starts from a reference sequence picked at random (seeded) among the
    inputs; each iteration aligns every sequence to the current average
    and replaces each average frame with the mean of all frames aligned
    to it. Alignment uses squared-Euclidean pointwise cost: that is the
    objective the mean update descends on, which makes the summed
    alignment cost non-increasing from iteration to iteration. Stops
    when that cost decreases by less than tol (relative) or after
    max_iter iterations. The average keeps the reference sequence's
    length.

    With return_costs=True, also returns the per-iteration summed
    alignment costs (each measured against the average entering that
    iteration).
    """
    sequences = [np.atleast_2d(np.asarray(s, dtype=float)) for s in sequences]
    if not sequences:
        raise EmptySession("nothing to average")
    rng = np.random.default_rng(seed)
    reference = int(rng.integers(len(sequences)))
    average = sequences[reference].copy()

    costs = []
    previous = None
    for _ in range(max_iter):
        sums = np.zeros_like(average)
        counts = np.zeros(average.shape[0])
        total = 0.0
        for seq in sequences:
            cost, path = _dtw_core(cdist(average, seq, "sqeuclidean"))
            total += cost
            for i, j in path:
                sums[i] += seq[j]
                counts[i] += 1
        costs.append(total)
        average = sums / counts[:, None]
        if previous is not None:
            decrease = previous - total
            if decrease < tol * max(previous, 1e-300):
                break
        previous = total

    if return_costs:
        return average, costs
    return average


def _kmeans_pp(points, k, rng):
    """k-means++ seeding: spread initial centroids by squared distance."""
    n = points.shape[0]
    centroids = np.empty((k, points.shape[1]))
    centroids[0] = points[int(rng.integers(n))]
    closest = cdist(points, centroids[:1])[:, 0] ** 2
    for i in range(1, k):
        total = closest.sum()
        if total <= 0.0:
            pick = int(rng.integers(n))
        else:
            pick = int(rng.choice(n, p=closest / total))
        centroids[i] = points[pick]
        d = cdist(points, centroids[i : i + 1])[:, 0] ** 2
        closest = np.minimum(closest, d)
    return centroids


def _lloyd(points, centroids, max_iter=KMEANS_MAX_ITER):
    """k-means iterations to an assignment fixpoint.

    Empty clusters are re-seeded to the point currently farthest from
    its own centroid (unless every point is already propping up another
    singleton cluster).
    """
    centroids = np.array(centroids, dtype=float)
    k = centroids.shape[0]
    labels = None
    for _ in range(max_iter):
        d = cdist(points, centroids)
        new_labels = d.argmin(axis=1)
        counts = np.bincount(new_labels, minlength=k)
        if np.any(counts == 0):
            own = d[np.arange(points.shape[0]), new_labels].copy()
            for j in np.flatnonzero(counts == 0):
                if np.all(own < 0):
                    break
                far = int(own.argmax())
                centroids[j] = points[far]
                new_labels[far] = j
                own[far] = -1.0
            counts = np.bincount(new_labels, minlength=k)
        if labels is not None and np.array_equal(labels, new_labels):
            break
        labels = new_labels
        for j in range(k):
            if counts[j] > 0:
                centroids[j] = points[labels == j].mean(axis=0)
    return centroids, labels


def _bic(points, centroids, labels):
    """Spherical-Gaussian BIC of a k-means model on its own points.

    Identical per-cluster variance. A model with no degrees of freedom
    left scores -inf (it can never win a split); a zero-variance model
    fits its points perfectly and scores +inf, the likelihood limit --
    so exact duplicate groups do get pulled apart, while a parent that
    is itself zero-variance never splits further (+inf is not > +inf).
    """
    r, d = points.shape
    k = centroids.shape[0]
    if r - k <= 0:
        return -np.inf
    sse = float(np.sum((points - centroids[labels]) ** 2))
    variance = sse / (r - k)
    if variance <= 0.0:
        return np.inf
    counts = np.bincount(labels, minlength=k).astype(float)
    counts = counts[counts > 0]
    log_likelihood = float(
        np.sum(
            counts * np.log(counts)
            - counts * np.log(r)
            - counts * 0.5 * np.log(2.0 * np.pi)
            - counts * d * 0.5 * np.log(variance)
            - (counts - k) * 0.5
        )
    )
    n_params = k - 1 + d * k + 1
    return log_likelihood - n_params / 2.0 * np.log(r)


def xmeans(points, k_min=DEFAULT_K_MIN, k_max=DEFAULT_K_MAX, seed=0):
    """Estimate cluster count and centroids by BIC-guided splitting.

    Runs seeded k-means at k_min, then repeatedly tries to split each
    cluster in two, keeping splits that raise the cluster-local BIC,
    until no split survives or k_max is reached. Finishes with a full
    k-means refinement over all points.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[0] == 0:
        raise ValidationError("xmeans needs at least one point")
    if not 1 <= k_min <= k_max:
        raise ValidationError(f"need 1 <= k_min <= k_max, got {k_min}..{k_max}")
    rng = np.random.default_rng(seed)
    k_min = min(k_min, points.shape[0])
    centroids, labels = _lloyd(points, _kmeans_pp(points, k_min, rng))

    while centroids.shape[0] < k_max:
        kept = []
        split_any = False
        k_now = centroids.shape[0]
        grown = k_now
        for j in range(k_now):
            members = points[labels == j]
            if members.shape[0] < 2 or grown >= k_max:
                kept.append(centroids[j : j + 1])
                continue
            children, child_labels = _lloyd(members, _kmeans_pp(members, 2, rng))
            parent = members.mean(axis=0, keepdims=True)
            before = _bic(members, parent, np.zeros(members.shape[0], dtype=int))
            after = _bic(members, children, child_labels)
            if after > before:
                kept.append(children)
                grown += 1
                split_any = True
            else:
                kept.append(centroids[j : j + 1])
        if not split_any:
            break
        centroids, labels = _lloyd(points, np.vstack(kept))

    centroids, _ = _lloyd(points, centroids)
    return centroids


def _run_lengths(labels):
    segments = []
    start = 0
    for t in range(1, len(labels) + 1):
        if t == len(labels) or labels[t] != labels[start]:
            segments.append(Segment(cluster_id=int(labels[start]), start=start, end=t))
            start = t
    return tuple(segments)


def cluster_poses(
    animation_set,
    seed=0,
    k_min=DEFAULT_K_MIN,
    k_max=DEFAULT_K_MAX,
    median_window=DEFAULT_MEDIAN_WINDOW,
):
    """Group every frame of every clip into pose clusters.

    Pipeline: per-frame pose features for all clips; DBA average of the
    set; x-means on the average's frames to pick the cluster count N and
    initial centroids; k-means over all frames of all clips starting
    from those centroids; optional median smoothing of the label
    sequences (median_window must be odd; 1 disables); run-length
    encoding into segments.
    """
    if animation_set.num_clips == 0:
        raise EmptySession("animation set has no clips")
    if median_window < 1 or median_window % 2 == 0:
        raise ValidationError(f"median_window must be odd and >= 1, got {median_window}")
    rng = np.random.default_rng(seed)

    features = [clip_features(clip) for clip in animation_set.clips]
    average = dba_average(features, seed=rng)
    centroids = xmeans(average, k_min=k_min, k_max=k_max, seed=rng)

    stacked = np.vstack(features)
    centroids, flat_labels = _lloyd(stacked, centroids)

    labels = []
    offset = 0
    for feat in features:
        clip_labels = flat_labels[offset : offset + feat.shape[0]]
        if median_window > 1:
            clip_labels = median_filter(clip_labels, size=median_window, mode="nearest")
        labels.append(np.asarray(clip_labels))
        offset += feat.shape[0]

    # renumber cluster ids in order of first appearance for stable colours
    remap = {}
    for clip_labels in labels:
        for value in clip_labels:
            if int(value) not in remap:
                remap[int(value)] = len(remap)
    for old in range(centroids.shape[0]):
        if old not in remap:
            remap[old] = len(remap)
    order = sorted(remap, key=remap.get)
    centroids = centroids[order]
    labels = tuple(
        np.array([remap[int(v)] for v in clip_labels], dtype=int) for clip_labels in labels
    )

    segments = tuple(_run_lengths(clip_labels) for clip_labels in labels)
    seed_value = seed if isinstance(seed, (int, np.integer)) else -1
    return PoseClustering(
        n_clusters=centroids.shape[0],
        centroids=centroids,
        labels=labels,
        segments=segments,
        seed=int(seed_value),
    )
