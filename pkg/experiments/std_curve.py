"""
Spread of released data as a function of k: sqrt(1 + 2 b^2), where 1 is the
per-coordinate variance of the blobs and 2 b^2 the Laplace noise variance.
"""

import math
from typing import Dict, List, Sequence

from config import DEFAULT_ALPHA, DEFAULT_EPSILON, DEFAULT_T_MULTIPLIER
from privacy.noise import calibrate_element_wise, calibrate_row_wise
from schemas import ExperimentKind, ExperimentReport, PrivacyMode

DEFAULT_K_VALUES = tuple(range(2, 21))
TABLE_HEADER = ["k", "mode", "b", "std"]


def released_std(b: float) -> float:
    return math.sqrt(1.0 + 2.0 * b * b)


def run_std_curve(
    k_values: Sequence[int] = DEFAULT_K_VALUES,
    epsilon: float = DEFAULT_EPSILON,
    alpha: float = DEFAULT_ALPHA,
    t_multiplier: float = DEFAULT_T_MULTIPLIER,
    d: int = 100,
) -> ExperimentReport:
    # d only enters the element-wise failure bound, not b
    results: List[Dict] = []
    for k in k_values:
        for params in (calibrate_element_wise(k, epsilon, d), calibrate_row_wise(k, epsilon, alpha, t_multiplier)):
            results.append(
                {
                    "k": int(k),
                    "mode": params.mode.value,
                    "b": params.b,
                    "std": released_std(params.b),
                    "failure_bound": params.failure_bound,
                }
            )
    return ExperimentReport(
        experiment=ExperimentKind.STD_CURVE,
        config={"k_values": [int(k) for k in k_values], "epsilon": epsilon, "alpha": alpha, "t_multiplier": t_multiplier, "d": d},
        results=results,
    )


def curve(report: ExperimentReport, mode: PrivacyMode) -> Dict[int, float]:
    return {r["k"]: r["std"] for r in report.results if r["mode"] == PrivacyMode(mode).value}
