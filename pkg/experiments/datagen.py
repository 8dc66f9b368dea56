"""
Two isotropic Gaussian blobs.
Centres sit at -/+ (center_distance / 2) on the first axis; rows are shuffled.
"""

from dataclasses import dataclass

import numpy as np

from config import DEFAULT_CENTER_DISTANCE, DEFAULT_CLUSTER_STD, DEFAULT_N_PER_CLUSTER
from privacy.errors import InvalidDataError
from privacy.rng import RngSeed, derive_stream, generator
from privacy.types import DataMatrix


@dataclass(frozen=True)
class LabeledDataset:
    data: DataMatrix
    labels: np.ndarray
    centers: np.ndarray

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64).copy()
        if labels.shape != (self.data.rows,):
            raise InvalidDataError(f"{labels.shape[0]} labels for {self.data.rows} rows")
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)


def blob_centers(d: int, center_distance: float) -> np.ndarray:
    centers = np.zeros((2, d))
    centers[0, 0] = -center_distance / 2.0
    centers[1, 0] = center_distance / 2.0
    return centers


def make_blobs(
    n_per_cluster: int = DEFAULT_N_PER_CLUSTER,
    d: int = 3,
    center_distance: float = DEFAULT_CENTER_DISTANCE,
    cluster_std: float = DEFAULT_CLUSTER_STD,
    *,
    rng: RngSeed,
) -> LabeledDataset:
    if n_per_cluster < 1 or d < 1:
        raise InvalidDataError(f"need n_per_cluster >= 1 and d >= 1, got {n_per_cluster}, {d}")
    if center_distance < 0:
        raise InvalidDataError(f"center_distance must be non-negative, got {center_distance}")
    if not cluster_std > 0:
        raise InvalidDataError(f"cluster_std must be positive, got {cluster_std}")

    centers = blob_centers(d, center_distance)
    labels = np.repeat(np.arange(2), n_per_cluster)
    points = centers[labels] + generator(derive_stream(rng, 0)).normal(0.0, cluster_std, size=(labels.size, d))
    order = generator(derive_stream(rng, 1)).permutation(labels.size)
    return LabeledDataset(DataMatrix(points[order]), labels[order], centers)
