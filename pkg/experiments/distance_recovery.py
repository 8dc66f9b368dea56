"""
Distance-recovery error distribution.

Samples row pairs from a two-blob dataset, pushes each pair through the
mechanism `n_repeats` times (fresh projection and noise every time) and records
D(private pair) - true squared distance.
"""

from typing import Dict, List, Sequence, Tuple

import numpy as np

from config import DEFAULT_ALPHA, DEFAULT_CENTER_DISTANCE, DEFAULT_CLUSTER_STD, DEFAULT_EPSILON
from config import DEFAULT_N_PAIRS, DEFAULT_N_PER_CLUSTER, DEFAULT_N_REPEATS, DEFAULT_T_MULTIPLIER, HISTOGRAM_BINS
from experiments.datagen import make_blobs
from privacy.diagnostics import simulate_pair, standard_error
from privacy.errors import InvalidDataError
from privacy.noise import calibrate
from privacy.rng import derive_stream, generator, root_seed
from schemas import ExperimentKind, ExperimentReport, PrivacyMode
from utils.logger import logger


def sample_pairs(n: int, n_pairs: int, gen: np.random.Generator) -> np.ndarray:
    """n_pairs index pairs (i, j) with i != j."""
    if n < 2:
        raise InvalidDataError("need at least two rows to sample pairs")
    first = gen.integers(0, n, size=n_pairs)
    second = (first + 1 + gen.integers(0, n - 1, size=n_pairs)) % n
    return np.stack([first, second], axis=1)


def histogram(differences: np.ndarray, bins: int = HISTOGRAM_BINS) -> Tuple[np.ndarray, np.ndarray]:
    """Counts and edges over the symmetric range [-max|diff|, +max|diff|]."""
    limit = float(np.max(np.abs(differences))) if differences.size else 0.0
    if limit == 0.0:
        limit = 1.0
    return np.histogram(differences, bins=bins, range=(-limit, limit))


def run_distance_recovery(
    n_pairs: int = DEFAULT_N_PAIRS,
    n_repeats: int = DEFAULT_N_REPEATS,
    d: int = 3,
    k: int = 2,
    epsilon: float = DEFAULT_EPSILON,
    modes: Sequence[PrivacyMode] = (PrivacyMode.ELEMENT_WISE, PrivacyMode.ROW_WISE),
    seed: int = 0,
    alpha: float = DEFAULT_ALPHA,
    t_multiplier: float = DEFAULT_T_MULTIPLIER,
    n_per_cluster: int = DEFAULT_N_PER_CLUSTER,
    exact_projection: bool = False,
    center_distance: float = DEFAULT_CENTER_DISTANCE,
    cluster_std: float = DEFAULT_CLUSTER_STD,
) -> Tuple[ExperimentReport, Dict[str, np.ndarray]]:
    if n_pairs < 1 or n_repeats < 1:
        raise InvalidDataError(f"n_pairs and n_repeats must be positive, got {n_pairs}, {n_repeats}")
    root = root_seed(seed)
    dataset = make_blobs(n_per_cluster, d, center_distance, cluster_std, rng=derive_stream(root, 0))
    pairs = sample_pairs(dataset.data.rows, n_pairs, generator(derive_stream(root, 1)))
    values = dataset.data.values

    results: List[Dict] = []
    differences: Dict[str, np.ndarray] = {}
    for mode_index, mode in enumerate(modes):
        mode = PrivacyMode(mode)
        params = calibrate(mode, k, epsilon, d=d, alpha=alpha, t_multiplier=t_multiplier)
        logger.info(f"Distance recovery ({mode.value}): {n_pairs} pairs x {n_repeats} repeats, b={params.b:.6g}")
        mode_seed = derive_stream(root, 2 + mode_index)
        errors = np.empty(n_pairs * n_repeats)
        for p, (i, j) in enumerate(pairs):
            samples = simulate_pair(
                values[i] - values[j], k, params.b, n_repeats, derive_stream(mode_seed, p), exact_projection
            )
            errors[p * n_repeats : (p + 1) * n_repeats] = samples.errors
        se = standard_error(errors)
        mean = float(errors.mean())
        differences[mode.value] = errors
        results.append(
            {
                "mode": mode.value,
                "b": params.b,
                "sigma2": params.sigma2,
                "mean_difference": mean,
                "std_difference": float(np.std(errors, ddof=1)) if errors.size > 1 else 0.0,
                "std_error": se,
                "z_score": mean / se if se > 0 and np.isfinite(se) else 0.0,
                "max_abs_difference": float(np.max(np.abs(errors))),
                "count": int(errors.size),
            }
        )

    report = ExperimentReport(
        experiment=ExperimentKind.DISTANCE_RECOVERY,
        config={
            "n_pairs": n_pairs,
            "n_repeats": n_repeats,
            "d": d,
            "k": k,
            "epsilon": epsilon,
            "alpha": alpha,
            "t_multiplier": t_multiplier,
            "n_per_cluster": n_per_cluster,
            "center_distance": center_distance,
            "cluster_std": cluster_std,
            "seed": seed,
            "exact_projection": exact_projection,
            "histogram_bins": HISTOGRAM_BINS,
        },
        results=results,
    )
    return report, differences
