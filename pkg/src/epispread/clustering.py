"""Standardization, k-means partitioning and silhouette-based model selection.

The clustering stage prepares the training data for the per-cluster networks:
features are z-scored, partitioned by Lloyd's algorithm (k-means++ seeding,
best of several restarts), and the cluster count is chosen by mean silhouette
over a candidate set.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateFeature

__all__ = [
    "StandardizationParams",
    "ClusterModel",
    "KCandidateScore",
    "standardize",
    "destandardize",
    "kmeans",
    "silhouette",
    "select_k",
    "write_cluster_report",
    "write_selection_report",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class StandardizationParams:
    """Per-feature mean and sample (n-1) standard deviation."""

    mean: np.ndarray
    std: np.ndarray

    def apply(self, values):
        return (np.asarray(values, dtype=np.float64) - self.mean) / self.std

    def invert(self, zscores):
        return np.asarray(zscores, dtype=np.float64) * self.std + self.mean


def standardize(data):
    """Z-score each feature column; returns (standardized, params).

    Accepts a 1-D array (single feature) or an (n, d) matrix of feature rows.
    Raises DegenerateFeature if any column has zero variance.
    """
    arr = np.asarray(data, dtype=np.float64)
    cols = arr[:, None] if arr.ndim == 1 else arr
    if cols.ndim != 2:
        raise ValueError("expected a 1-D or 2-D array")
    if cols.shape[0] < 2:
        raise ValueError("need at least 2 rows to standardize")
    mean = cols.mean(axis=0)
    std = cols.std(axis=0, ddof=1)
    bad = np.flatnonzero(std == 0.0)
    if bad.size:
        raise DegenerateFeature(f"feature column(s) {bad.tolist()} are constant")
    params = StandardizationParams(mean=mean, std=std)
    z = (cols - mean) / std
    return (z[:, 0] if arr.ndim == 1 else z), params


def destandardize(zscores, params):
    """Invert `standardize` using the stored parameters."""
    arr = np.asarray(zscores, dtype=np.float64)
    if arr.ndim == 1 and params.mean.shape == (1,):
        return arr * params.std[0] + params.mean[0]
    return params.invert(arr)


@dataclass
class ClusterModel:
    """A fitted k-means partition in standardized feature space.

    ``objective`` is the summed squared Euclidean distance of every point to
    its centroid; ``objective_history`` records that value at each Lloyd
    iteration of the winning restart (non-increasing by construction).
    """

    k: int
    centroids: np.ndarray
    assignments: np.ndarray
    objective: float
    standardization: StandardizationParams | None = None
    objective_history: list = field(default_factory=list)


def _squared_distances(data, centroids):
    return ((data[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)


def _kmeanspp_init(data, k, rng):
    n = data.shape[0]
    centroids = np.empty((k, data.shape[1]), dtype=np.float64)
    centroids[0] = data[rng.integers(n)]
    for j in range(1, k):
        d2 = _squared_distances(data, centroids[:j]).min(axis=1)
        total = d2.sum()
        if total > 0.0:
            idx = rng.choice(n, p=d2 / total)
        else:
            idx = rng.integers(n)
        centroids[j] = data[idx]
    return centroids


def _lloyd(data, centroids, max_iter):
    n = data.shape[0]
    k = centroids.shape[0]
    assign = None
    history = []
    for _ in range(max_iter):
        d2 = _squared_distances(data, centroids)
        new_assign = d2.argmin(axis=1)
        own = d2[np.arange(n), new_assign].copy()
        for j in range(k):
            if not (new_assign == j).any():
                far = int(own.argmax())
                log.warning(
                    "empty cluster %d reseeded to point %d (EmptyClusterRepair)",
                    j, far,
                )
                centroids[j] = data[far]
                new_assign[far] = j
                own[far] = 0.0
        history.append(
            float(((data - centroids[new_assign]) ** 2).sum())
        )
        if assign is not None and np.array_equal(new_assign, assign):
            break
        assign = new_assign
        for j in range(k):
            members = data[assign == j]
            # a repair can steal a singleton's only point; leave the stale
            # centroid in place and let the next iteration repair it
            if members.shape[0]:
                centroids[j] = members.mean(axis=0)
    # final assignment against the final centroids, so every point ends on
    # its nearest centroid even if max_iter cut the loop mid-cycle
    d2 = _squared_distances(data, centroids)
    assign = d2.argmin(axis=1)
    objective = float(d2[np.arange(n), assign].sum())
    return centroids, assign, objective, history


def kmeans(data, k, seed, max_iter=100, restarts=10):
    """Best-of-``restarts`` Lloyd's k-means with k-means++ seeding.

    ``data`` must already be standardized; distances are plain Euclidean.
    Deterministic for a given seed.
    """
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2:
        raise ValueError("expected an (n, d) matrix")
    k = int(k)
    if k < 1:
        raise ValueError("k must be >= 1")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    n_distinct = np.unique(data, axis=0).shape[0]
    if k > n_distinct:
        raise ValueError(f"k={k} exceeds the {n_distinct} distinct points")
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(max(1, int(restarts))):
        centroids = _kmeanspp_init(data, k, rng)
        centroids, assign, objective, history = _lloyd(data, centroids, max_iter)
        if best is None or objective < best.objective:
            best = ClusterModel(
                k=k,
                centroids=centroids.copy(),
                assignments=assign.copy(),
                objective=objective,
                objective_history=history,
            )
    return best


def silhouette(data, assignments):
    """Per-point silhouette scores and their mean.

    s(i) = (b(i) - a(i)) / max(a(i), b(i)) with a the mean distance to the
    point's own cluster and b the smallest mean distance to another cluster.
    Points in singleton clusters score 0.  Requires at least two clusters.
    """
    data = np.asarray(data, dtype=np.float64)
    if data.ndim == 1:
        data = data[:, None]
    assignments = np.asarray(assignments)
    labels = np.unique(assignments)
    if labels.size < 2:
        raise ValueError("silhouette is undefined for a single cluster")
    n = data.shape[0]
    dist = np.sqrt(_squared_distances(data, data))
    scores = np.zeros(n, dtype=np.float64)
    masks = {lab: assignments == lab for lab in labels}
    for i in range(n):
        own = masks[assignments[i]]
        size = own.sum()
        if size == 1:
            continue
        a = dist[i, own].sum() / (size - 1)
        b = min(
            dist[i, masks[lab]].mean()
            for lab in labels
            if lab != assignments[i]
        )
        denom = max(a, b)
        scores[i] = 0.0 if denom == 0.0 else (b - a) / denom
    return scores, float(scores.mean())


@dataclass(frozen=True)
class KCandidateScore:
    """One row of the cluster-count selection table."""

    k: int
    mean_silhouette: float
    objective: float


def select_k(data, candidates, seed, max_iter=100, restarts=10):
    """Pick the cluster count with the highest mean silhouette.

    Ties break toward the smaller k.  Returns (best_k, table) where the table
    holds one KCandidateScore per candidate for reporting.
    """
    candidates = sorted(set(int(k) for k in candidates))
    if not candidates:
        raise ValueError("no candidate cluster counts given")
    table = []
    best_k = None
    best_score = -np.inf
    for k in candidates:
        if k < 2:
            raise ValueError("silhouette selection needs k >= 2")
        # derived per-candidate stream keeps runs independent of the
        # candidate ordering
        cm = kmeans(data, k, seed=[seed, k], max_iter=max_iter, restarts=restarts)
        _, mean_score = silhouette(data, cm.assignments)
        table.append(KCandidateScore(k=k, mean_silhouette=mean_score,
                                     objective=cm.objective))
        if mean_score > best_score:
            best_score = mean_score
            best_k = k
    return best_k, table


def write_cluster_report(path, assignments, scores):
    """CSV report `point_index,cluster,silhouette`."""
    with open(path, "w") as fh:
        fh.write("point_index,cluster,silhouette\n")
        for i, (c, s) in enumerate(zip(assignments, scores)):
            fh.write(f"{i},{int(c)},{s:.17g}\n")


def write_selection_report(path, table):
    """CSV report `k,mean_silhouette,V` from a select_k table."""
    with open(path, "w") as fh:
        fh.write("k,mean_silhouette,V\n")
        for row in table:
            fh.write(f"{row.k},{row.mean_silhouette:.17g},{row.objective:.17g}\n")
