"""
Clustering utility comparison: k-means accuracy on the original data and on
element-wise and row-wise releases, over a grid of (d, k) and a set of seeds.
Each seed draws a fresh dataset and a fresh release.
"""

from typing import Dict, List, Sequence, Tuple

import numpy as np

from config import DEFAULT_ALPHA, DEFAULT_CENTER_DISTANCE, DEFAULT_CLUSTER_STD, DEFAULT_EPSILON
from config import DEFAULT_N_PER_CLUSTER, DEFAULT_T_MULTIPLIER, KMEANS_MAX_ITER, KMEANS_N_INIT, KMEANS_TOL
from config import TABLE1_SEEDS
from experiments.clustering import clustering_accuracy, kmeans
from experiments.datagen import make_blobs
from privacy.errors import InvalidDataError
from privacy.mechanism import release
from privacy.noise import calibrate_element_wise, calibrate_row_wise
from privacy.rng import RngSeed, derive_stream, root_seed
from privacy.types import DataMatrix
from schemas import ExperimentKind, ExperimentReport, PrivacyParams
from utils.logger import logger

DEFAULT_GRID: Tuple[Tuple[int, int], ...] = ((3, 2), (10, 3), (50, 10), (100, 20))
MECHANISMS = ("none", "element", "row")

# Published accuracies for the default grid, for side-by-side comparison
PUBLISHED_ACCURACY: Dict[str, Dict[Tuple[int, int], float]] = {
    "none": {(3, 2): 0.9783, (10, 3): 0.9772, (50, 10): 0.9771, (100, 20): 0.9797},
    "element": {(3, 2): 0.9441, (10, 3): 0.9082, (50, 10): 0.6954, (100, 20): 0.6927},
    "row": {(3, 2): 0.9477, (10, 3): 0.909, (50, 10): 0.6796, (100, 20): 0.6668},
}

TABLE_HEADER = ["d", "k", "mechanism", "mean_accuracy", "std_accuracy", "std_error", "trials", "published",
                "delta_vs_published"]


def parse_grid(text: str) -> List[Tuple[int, int]]:
    """'3:2,10:3' -> [(3, 2), (10, 3)]."""
    grid = []
    for cell in filter(None, (part.strip() for part in text.split(","))):
        try:
            d, k = (int(v) for v in cell.split(":"))
        except ValueError:
            raise InvalidDataError(f"grid cell {cell!r} is not of the form d:k") from None
        grid.append((d, k))
    return grid


def _trial(d: int, params: Dict[str, PrivacyParams], setup: Dict, seed: RngSeed) -> Dict[str, float]:
    dataset = make_blobs(
        setup["n_per_cluster"], d, setup["center_distance"], setup["cluster_std"], rng=derive_stream(seed, 0)
    )
    inputs = {
        "none": dataset.data,
        "element": DataMatrix(release(dataset.data, params["element"], derive_stream(seed, 1)).z),
        "row": DataMatrix(release(dataset.data, params["row"], derive_stream(seed, 2)).z),
    }
    scores = {}
    for mechanism, data in inputs.items():
        result = kmeans(
            data, 2, setup["kmeans_n_init"], setup["kmeans_max_iter"], setup["kmeans_tol"], rng=derive_stream(seed, 3)
        )
        scores[mechanism] = clustering_accuracy(result.assignments, dataset.labels)
    return scores


def run_table1(
    grid: Sequence[Tuple[int, int]] = DEFAULT_GRID,
    epsilon: float = DEFAULT_EPSILON,
    seeds: int = TABLE1_SEEDS,
    seed: int = 0,
    alpha: float = DEFAULT_ALPHA,
    t_multiplier: float = DEFAULT_T_MULTIPLIER,
    n_per_cluster: int = DEFAULT_N_PER_CLUSTER,
    center_distance: float = DEFAULT_CENTER_DISTANCE,
    cluster_std: float = DEFAULT_CLUSTER_STD,
    kmeans_n_init: int = KMEANS_N_INIT,
    kmeans_max_iter: int = KMEANS_MAX_ITER,
    kmeans_tol: float = KMEANS_TOL,
) -> ExperimentReport:
    """Every input that shapes the numbers is echoed in the report config."""
    if not grid:
        raise InvalidDataError("table1 needs at least one (d, k) cell")
    if seeds < 1:
        raise InvalidDataError(f"seeds must be positive, got {seeds}")
    setup = {
        "n_per_cluster": n_per_cluster,
        "center_distance": center_distance,
        "cluster_std": cluster_std,
        "kmeans_n_init": kmeans_n_init,
        "kmeans_max_iter": kmeans_max_iter,
        "kmeans_tol": kmeans_tol,
    }
    root = root_seed(seed)
    results: List[Dict] = []
    for cell, (d, k) in enumerate(grid):
        logger.info(f"Table 1 cell d={d}, k={k}: {seeds} seeds")
        params = {
            "element": calibrate_element_wise(k, epsilon, d),
            "row": calibrate_row_wise(k, epsilon, alpha, t_multiplier),
        }
        scores: Dict[str, List[float]] = {m: [] for m in MECHANISMS}
        cell_seed = derive_stream(root, cell)
        for trial in range(seeds):
            for mechanism, score in _trial(d, params, setup, derive_stream(cell_seed, trial)).items():
                scores[mechanism].append(score)
        for mechanism in MECHANISMS:
            values = np.array(scores[mechanism])
            std = float(np.std(values, ddof=1)) if values.size > 1 else 0.0
            mean = float(values.mean())
            published = PUBLISHED_ACCURACY[mechanism].get((d, k))
            results.append(
                {
                    "d": d,
                    "k": k,
                    "mechanism": mechanism,
                    "mean_accuracy": mean,
                    "std_accuracy": std,
                    "std_error": std / float(np.sqrt(values.size)),
                    "trials": int(values.size),
                    "published": published,
                    "delta_vs_published": None if published is None else mean - published,
                }
            )
    return ExperimentReport(
        experiment=ExperimentKind.TABLE1,
        config={
            "grid": [list(c) for c in grid],
            "epsilon": epsilon,
            "seeds": seeds,
            "seed": seed,
            "alpha": alpha,
            "t_multiplier": t_multiplier,
            **setup,
        },
        results=results,
    )


def table_rows(report: ExperimentReport) -> List[List]:
    return [[r[h] if r[h] is not None else "" for h in TABLE_HEADER] for r in report.results]
