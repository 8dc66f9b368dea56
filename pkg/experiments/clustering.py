"""
k-means (Lloyd's algorithm with k-means++ seeding) and clustering accuracy.
"""

import itertools
from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np

from config import KMEANS_MAX_ITER, KMEANS_N_INIT, KMEANS_TOL
from privacy.errors import DimensionMismatchError, InvalidDataError
from privacy.rng import RngSeed, derive_stream, generator
from privacy.types import DataMatrix


@dataclass(frozen=True)
class ClusteringResult:
    centroids: np.ndarray
    assignments: np.ndarray
    inertia: float
    iterations: int
    inertia_history: List[float] = field(default_factory=list)


def _squared_distances(values: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    diff = values[:, None, :] - centroids[None, :, :]
    return np.sum(diff * diff, axis=2)


def _kmeans_plusplus(values: np.ndarray, k_clusters: int, gen: np.random.Generator) -> np.ndarray:
    n = values.shape[0]
    centroids = np.empty((k_clusters, values.shape[1]))
    centroids[0] = values[gen.integers(n)]
    closest = _squared_distances(values, centroids[:1])[:, 0]
    for c in range(1, k_clusters):
        total = closest.sum()
        # all remaining mass at zero: every point already coincides with a centroid
        index = gen.integers(n) if total <= 0 else gen.choice(n, p=closest / total)
        centroids[c] = values[index]
        closest = np.minimum(closest, _squared_distances(values, centroids[c : c + 1])[:, 0])
    return centroids


def _lloyd(values: np.ndarray, centroids: np.ndarray, max_iter: int, tol: float) -> ClusteringResult:
    k_clusters = centroids.shape[0]
    history: List[float] = []
    iterations = 0
    for iterations in range(1, max_iter + 1):
        d2 = _squared_distances(values, centroids)
        assignments = np.argmin(d2, axis=1)
        cost = d2[np.arange(values.shape[0]), assignments]
        history.append(float(cost.sum()))

        counts = np.bincount(assignments, minlength=k_clusters)
        for empty in np.flatnonzero(counts == 0):
            far = int(np.argmax(cost))
            if cost[far] <= 0:
                continue
            # reseed at the point worst served by its current centroid
            assignments[far] = empty
            cost[far] = 0.0
            counts = np.bincount(assignments, minlength=k_clusters)

        updated = centroids.copy()
        for c in range(k_clusters):
            members = assignments == c
            if members.any():
                updated[c] = values[members].mean(axis=0)
        shift = float(np.max(np.linalg.norm(updated - centroids, axis=1)))
        centroids = updated
        if shift <= tol:
            break

    d2 = _squared_distances(values, centroids)
    assignments = np.argmin(d2, axis=1)
    inertia = float(d2[np.arange(values.shape[0]), assignments].sum())
    history.append(inertia)
    return ClusteringResult(centroids, assignments, inertia, iterations, history)


def kmeans(
    x: DataMatrix,
    k_clusters: int = 2,
    n_init: int = KMEANS_N_INIT,
    max_iter: int = KMEANS_MAX_ITER,
    tol: float = KMEANS_TOL,
    *,
    rng: RngSeed,
) -> ClusteringResult:
    """Best of `n_init` k-means++ seeded Lloyd runs by inertia (ties: lowest init index)."""
    if k_clusters < 1 or k_clusters > x.rows:
        raise InvalidDataError(f"k_clusters must be in [1, {x.rows}], got {k_clusters}")
    if n_init < 1 or max_iter < 1 or tol < 0:
        raise InvalidDataError(f"bad k-means settings n_init={n_init}, max_iter={max_iter}, tol={tol}")

    best = None
    for run in range(n_init):
        gen = generator(derive_stream(rng, run))
        result = _lloyd(x.values, _kmeans_plusplus(x.values, k_clusters, gen), max_iter, tol)
        if best is None or result.inertia < best.inertia:
            best = result
    return best


def clustering_accuracy(assignments: Sequence[int], labels: Sequence[int]) -> float:
    """Fraction of rows labelled correctly under the best relabelling of clusters."""
    assignments = np.asarray(assignments)
    labels = np.asarray(labels)
    if assignments.shape != labels.shape:
        raise DimensionMismatchError(f"{assignments.size} assignments for {labels.size} labels")
    if labels.size == 0:
        raise InvalidDataError("accuracy of an empty labelling is undefined")
    classes = sorted(set(labels.tolist()) | set(assignments.tolist()))
    if len(classes) > 2:
        raise InvalidDataError(f"accuracy is defined for two classes, got {classes}")
    best = 0.0
    for perm in itertools.permutations(classes):
        mapping = dict(zip(classes, perm))
        relabelled = np.array([mapping[a] for a in assignments.tolist()])
        best = max(best, float(np.mean(relabelled == labels)))
    return best
