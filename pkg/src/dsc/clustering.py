"""Density-based separation of spectrogram frames.

The magnitude spectrogram's columns (per-frame spectra) are clustered twice
with DBSCAN over squared-Euclidean distances:

* stage 1 strips rare high-energy frames (wideband impulsive disturbances),
* stage 2, rerun on the remaining frames with a freshly estimated epsilon,
  splits them into sparse outlier frames (the cyclic fault signature) and the
  dense background-noise cluster.

Epsilon for each stage comes from the knee of the descending per-frame
k-nearest-neighbor distance curve.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientDataError, InvalidParameterError, StageCollapseError
from .spectral import MagnitudeSpectrogram

_KNEE_FLATNESS_RTOL = 1e-9  # curves flatter than this (relative) have no knee


@dataclass
class DistanceMatrix:
    """Symmetric squared-Euclidean distances between selected frame columns."""

    values: np.ndarray
    frame_indices: np.ndarray
    metric: str = "sqeuclidean"

    @property
    def n_points(self) -> int:
        return self.values.shape[0]


@dataclass
class DbscanParams:
    epsilon: float
    min_pts: int = 4

    def __post_init__(self):
        if not self.epsilon > 0:
            raise InvalidParameterError(f"epsilon must be > 0, got {self.epsilon}")
        if self.min_pts < 1:
            raise InvalidParameterError(f"min_pts must be >= 1, got {self.min_pts}")


@dataclass
class FrameLabels:
    """Cluster id per point (-1 for outliers) and core/boundary/outlier state."""

    labels: np.ndarray
    point_state: np.ndarray

    @property
    def n_clusters(self) -> int:
        return int(self.labels.max()) + 1 if np.any(self.labels >= 0) else 0

    def cluster_sizes(self) -> np.ndarray:
        return np.bincount(self.labels[self.labels >= 0], minlength=self.n_clusters)


@dataclass
class EpsilonEstimate:
    """Knee of the descending k-NN distance curve, with diagnostics."""

    value: float
    degenerate: bool
    knee_index: int
    kdistances: np.ndarray


@dataclass
class StageDiagnostics:
    stage: int
    epsilon: float
    degenerate_knee: bool
    min_pts: int
    n_frames: int
    n_outliers: int
    n_clusters: int


@dataclass
class ClassPartition:
    """Column-exclusive split of a magnitude spectrogram into three matrices.

    z1 holds non-cyclic impulse frames, z2 the cyclic signal of interest,
    z3 the background noise; z1 + z2 + z3 reproduces the input exactly.
    """

    z1: MagnitudeSpectrogram
    z2: MagnitudeSpectrogram
    z3: MagnitudeSpectrogram
    class_of_frame: np.ndarray
    stages: list[StageDiagnostics] = field(default_factory=list)

    def frame_indices(self, cls: int) -> np.ndarray:
        return np.nonzero(self.class_of_frame == cls)[0]

    def class_counts(self) -> dict[int, int]:
        return {cls: int(np.sum(self.class_of_frame == cls)) for cls in (1, 2, 3)}


def pairwise_distances(spec: MagnitudeSpectrogram,
                       active_frames: np.ndarray | None = None) -> DistanceMatrix:
    """Squared Euclidean distance between every pair of active frame columns."""
    if active_frames is None:
        idx = np.arange(spec.n_frames)
    else:
        active_frames = np.asarray(active_frames)
        if active_frames.dtype == bool:
            idx = np.nonzero(active_frames)[0]
        else:
            idx = active_frames.astype(np.int64)
    if idx.size < 2:
        raise InsufficientDataError(
            f"need at least 2 active frames for pairwise distances, got {idx.size}"
        )
    x = spec.values[:, idx].T
    sq_norms = np.einsum("ij,ij->i", x, x)
    d = sq_norms[:, None] + sq_norms[None, :] - 2.0 * (x @ x.T)
    np.maximum(d, 0.0, out=d)
    d = 0.5 * (d + d.T)
    np.fill_diagonal(d, 0.0)
    return DistanceMatrix(d, idx)


def estimate_epsilon(dist: DistanceMatrix, min_pts: int = 4) -> EpsilonEstimate:
    """Knee of the per-point k-NN distances (k = min_pts, a point counts itself),
    sorted in descending order.

    Both axes are normalized to [0, 1] before locating the point of maximum
    perpendicular distance from the chord joining the curve's endpoints
    (otherwise a head spanning several decades drags the knee up the tail).
    The knee index is invariant under uniform scaling of the distances, so
    the estimate scales with the data. A flat curve (no knee) is flagged
    degenerate and its median returned.
    """
    n = dist.n_points
    k = min(min_pts, n) - 1
    kdist = np.sort(dist.values, axis=1)[:, k]
    curve = np.sort(kdist)[::-1]

    v0, v1 = curve[0], curve[-1]
    if n < 2 or v0 == v1:
        return EpsilonEstimate(float(np.median(curve)), True, n // 2, curve)
    x = np.arange(n) / (n - 1)
    y = (curve - v1) / (v0 - v1)
    # chord runs (0, 1) -> (1, 0); perpendicular distance is |1 - x - y| / sqrt(2)
    chord_dist = np.abs(1.0 - x - y) / np.sqrt(2.0)
    if chord_dist.max() <= _KNEE_FLATNESS_RTOL:
        return EpsilonEstimate(float(np.median(curve)), True, n // 2, curve)
    knee = int(np.argmax(chord_dist))
    return EpsilonEstimate(float(curve[knee]), False, knee, curve)


def dbscan(dist: DistanceMatrix, params: DbscanParams) -> FrameLabels:
    """Density-based labeling over a precomputed distance matrix.

    Core points have at least min_pts neighbors within epsilon (counting
    themselves); clusters are connected components of core points plus the
    boundary points they reach. Boundary points reachable from several
    clusters go to the cluster of their nearest core point, which keeps the
    labeling independent of point order.
    """
    n = dist.n_points
    adjacent = dist.values <= params.epsilon
    core = adjacent.sum(axis=1) >= params.min_pts

    labels = np.full(n, -1, dtype=np.int64)
    cluster_id = 0
    for start in range(n):
        if not core[start] or labels[start] != -1:
            continue
        stack = [start]
        labels[start] = cluster_id
        while stack:
            p = stack.pop()
            for q in np.nonzero(adjacent[p] & core)[0]:
                if labels[q] == -1:
                    labels[q] = cluster_id
                    stack.append(q)
        cluster_id += 1

    state = np.full(n, "outlier", dtype="<U8")
    state[core] = "core"
    border = ~core & (adjacent & core[None, :]).any(axis=1)
    for p in np.nonzero(border)[0]:
        candidates = np.nonzero(adjacent[p] & core)[0]
        nearest = candidates[np.argmin(dist.values[p, candidates])]
        labels[p] = labels[nearest]
        state[p] = "boundary"
    return FrameLabels(labels, state)


def frame_distribution_matrix(spec: MagnitudeSpectrogram) -> MagnitudeSpectrogram:
    """Per-frame empirical magnitude distributions: each column sorted descending.

    Distances between these columns compare what magnitudes occur in a frame
    rather than where they sit on the frequency axis; for frames of white
    background noise the sorted columns nearly coincide, so frames carrying
    rare energetic components stand far out.
    """
    return MagnitudeSpectrogram(np.sort(spec.values, axis=0)[::-1],
                                spec.config, spec.sample_rate)


# Stage defaults: wideband disturbances sit decades above the k-NN distance
# bulk, the fault component within about one decade, so the two stages cut at
# different multiples of the median.
STAGE1_FENCE_RATIO = 30.0
STAGE2_FENCE_RATIO = 3.0


def median_fence_epsilon(dist: DistanceMatrix, min_pts: int,
                         fence_ratio: float) -> EpsilonEstimate:
    """Fence at ``fence_ratio`` times the median k-NN distance.

    A robust realization of the sorted-distance-curve knee: the median pins
    the within-bulk distance scale, the ratio sets how far above it a frame
    must sit to count as sparse. With nothing beyond the fence no frame is
    labeled an outlier. Scale-equivariant; flagged degenerate when the curve
    is flat.
    """
    n = dist.n_points
    k = min(min_pts, n) - 1
    kdist = np.sort(dist.values, axis=1)[:, k]
    curve = np.sort(kdist)[::-1]
    med = float(np.median(kdist))
    if curve[0] <= 0 or curve[0] == curve[-1]:
        return EpsilonEstimate(max(med, np.finfo(float).tiny), True, n // 2, curve)
    value = max(fence_ratio * med, np.finfo(float).tiny)
    return EpsilonEstimate(value, False, int(np.searchsorted(-curve, -value)), curve)


def _stage(spec: MagnitudeSpectrogram, frames: np.ndarray, min_pts: int,
           epsilon: float | None, stage_no: int) -> tuple[FrameLabels, DistanceMatrix,
                                                          StageDiagnostics]:
    dist = pairwise_distances(spec, frames)
    degenerate = False
    if epsilon is None:
        ratio = STAGE1_FENCE_RATIO if stage_no == 1 else STAGE2_FENCE_RATIO
        est = median_fence_epsilon(dist, min_pts, ratio)
        epsilon, degenerate = est.value, est.degenerate
        if epsilon <= 0:
            # all-identical columns: any positive radius keeps them adjacent
            epsilon = np.finfo(float).tiny
    labeled = dbscan(dist, DbscanParams(epsilon, min_pts))
    diag = StageDiagnostics(
        stage=stage_no,
        epsilon=float(epsilon),
        degenerate_knee=degenerate,
        min_pts=min_pts,
        n_frames=int(dist.n_points),
        n_outliers=int(np.sum(labeled.labels == -1)),
        n_clusters=labeled.n_clusters,
    )
    return labeled, dist, diag


def dsc_partition(spec: MagnitudeSpectrogram, min_pts: int = 20,
                  epsilon_override: tuple[float | None, float | None] = (None, None),
                  frame_representation: str = "distribution") -> ClassPartition:
    """Two-stage density clustering of the spectrogram columns.

    Stage 1: outlier frames (and any minority clusters) become class 1; the
    largest cluster is carried forward. Stage 2 reruns the procedure on those
    frames with distances and epsilon recomputed; its outliers become class 2
    and everything clustered becomes class 3. Raises StageCollapseError when
    a stage leaves fewer than 4 frames to continue with.

    ``frame_representation`` selects what the distances compare:
    "distribution" (default) clusters the per-frame magnitude distributions
    (sorted columns), "spectrum" clusters the frequency-aligned columns.
    The returned partition always splits the original spectrogram.
    """
    t_frames = spec.n_frames
    if t_frames < 4:
        raise InsufficientDataError(f"need at least 4 frames, got {t_frames}")
    if frame_representation == "distribution":
        feature = frame_distribution_matrix(spec)
    elif frame_representation == "spectrum":
        feature = spec
    else:
        raise InvalidParameterError(
            f"frame_representation must be 'distribution' or 'spectrum', "
            f"got {frame_representation!r}"
        )

    all_frames = np.arange(t_frames)
    labels1, _, diag1 = _stage(feature, all_frames, min_pts, epsilon_override[0], 1)

    if labels1.n_clusters == 0:
        raise StageCollapseError(1, "stage 1 found no core cluster to carry forward")
    sizes = labels1.cluster_sizes()
    core_cluster = int(np.argmax(sizes))
    core_frames = all_frames[labels1.labels == core_cluster]
    if core_frames.size < 4:
        raise StageCollapseError(
            1, f"stage 1 left {core_frames.size} frames (< 4) for stage 2"
        )

    class_of_frame = np.full(t_frames, 1, dtype=np.int64)
    labels2, _, diag2 = _stage(feature, core_frames, min_pts, epsilon_override[1], 2)
    class_of_frame[core_frames[labels2.labels == -1]] = 2
    class_of_frame[core_frames[labels2.labels >= 0]] = 3

    parts = []
    for cls in (1, 2, 3):
        z = np.zeros_like(spec.values)
        cols = class_of_frame == cls
        z[:, cols] = spec.values[:, cols]
        parts.append(MagnitudeSpectrogram(z, spec.config, spec.sample_rate))

    return ClassPartition(parts[0], parts[1], parts[2], class_of_frame, [diag1, diag2])
