"""
Laplace noise and privacy calibration.

Element-wise neighbours (one entry changes by at most 1):
    c = 2 sqrt(k), guarantee fails with probability <= d e^{-k/2}
Row-wise neighbours (one row changes, squared norm <= alpha):
    t = multiplier * sqrt(2 ln(2k) alpha / k), c = k t,
    guarantee fails with probability <= 2k e^{-k t^2 / (2 alpha)} = (2k)^{1 - multiplier^2}
In both modes b = c / epsilon and the noise variance is sigma^2 = 2 b^2.
"""

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from config import DEFAULT_ALPHA, DEFAULT_T_MULTIPLIER
from privacy.errors import CalibrationError, InvalidDataError
from privacy.rng import RngSeed, generator
from privacy.types import as_frozen_matrix
from schemas import PrivacyMode, PrivacyParams
from utils.logger import logger

_REL_TOL = 1e-12


@dataclass(frozen=True)
class NoiseMatrix:
    values: np.ndarray
    b: float

    def __post_init__(self):
        object.__setattr__(self, "values", as_frozen_matrix(self.values, "NoiseMatrix"))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def k(self) -> int:
        return self.values.shape[1]


def laplace_from_uniform(u: np.ndarray, b: float) -> np.ndarray:
    """Inverse CDF of Laplace(0, b) for u in the open interval (-1/2, 1/2)."""
    return -b * np.sign(u) * np.log1p(-2.0 * np.abs(u))


def draw_laplace(gen: np.random.Generator, b: float, size) -> np.ndarray:
    # open interval: u = -1/2 would map to -inf
    u = gen.uniform(np.nextafter(-0.5, 0.0), 0.5, size=size)
    return laplace_from_uniform(u, b)


def sample_laplace_matrix(n: int, k: int, b: float, rng: RngSeed) -> NoiseMatrix:
    if not (b > 0 and math.isfinite(b)):
        raise InvalidDataError(f"Laplace scale must be positive and finite, got {b}")
    if n < 1 or k < 1:
        raise InvalidDataError(f"noise matrix dimensions must be positive, got n={n}, k={k}")
    return NoiseMatrix(draw_laplace(generator(rng), b, (n, k)), b)


def _check_common(k: int, epsilon: float) -> None:
    if isinstance(k, bool) or int(k) != k or k < 1:
        raise CalibrationError(f"k must be a positive integer, got {k}")
    if not (epsilon > 0 and math.isfinite(epsilon)):
        raise CalibrationError(f"epsilon must be positive and finite, got {epsilon}")


def _element_wise(k: int, epsilon: float, d: int) -> Tuple[PrivacyParams, float]:
    """Element-wise parameters and the unclamped failure bound, without logging."""
    _check_common(k, epsilon)
    if isinstance(d, bool) or int(d) != d or d < 1:
        raise CalibrationError(f"d must be a positive integer, got {d}")
    c = 2.0 * math.sqrt(k)
    b = c / epsilon
    unclamped = d * math.exp(-k / 2.0)
    params = PrivacyParams(
        mode=PrivacyMode.ELEMENT_WISE,
        epsilon=epsilon,
        k=int(k),
        d=int(d),
        c=c,
        b=b,
        sigma2=2.0 * b * b,
        failure_bound=min(1.0, unclamped),
        vacuous_bound=unclamped >= 1.0,
    )
    return params, unclamped


def row_wise_t_min(k: int, alpha: float) -> float:
    return math.sqrt(2.0 * math.log(2.0 * k) * alpha / k)


def _row_wise(k: int, epsilon: float, alpha: float, t_multiplier: float) -> Tuple[PrivacyParams, float]:
    """Row-wise parameters and the unclamped failure bound, without logging."""
    _check_common(k, epsilon)
    if not (alpha > 0 and math.isfinite(alpha)):
        raise CalibrationError(f"alpha must be positive and finite, got {alpha}")
    if not (t_multiplier >= 1 and math.isfinite(t_multiplier)):
        raise CalibrationError(
            f"t_multiplier must be >= 1 (t below sqrt(2 ln(2k) alpha / k) is not covered), got {t_multiplier}"
        )
    t = t_multiplier * row_wise_t_min(k, alpha)
    c = k * t
    b = c / epsilon
    # 2k e^{-k t^2 / 2 alpha} with the t^2 term expanded, so multiplier 1 gives exactly 1
    unclamped = (2.0 * k) ** (1.0 - t_multiplier * t_multiplier)
    params = PrivacyParams(
        mode=PrivacyMode.ROW_WISE,
        epsilon=epsilon,
        k=int(k),
        alpha=alpha,
        t=t,
        t_multiplier=t_multiplier,
        c=c,
        b=b,
        sigma2=2.0 * b * b,
        failure_bound=min(1.0, unclamped),
        vacuous_bound=unclamped >= 1.0,
    )
    return params, unclamped


def calibrate_element_wise(k: int, epsilon: float, d: int) -> PrivacyParams:
    params, unclamped = _element_wise(k, epsilon, d)
    if params.vacuous_bound:
        logger.warning(
            f"Element-wise failure bound d*e^(-k/2) = {unclamped:.4g} >= 1 for d={d}, k={k}: "
            "the privacy guarantee holds with no stated probability"
        )
    return params


def calibrate_row_wise(
    k: int,
    epsilon: float,
    alpha: float = DEFAULT_ALPHA,
    t_multiplier: float = DEFAULT_T_MULTIPLIER,
) -> PrivacyParams:
    params, unclamped = _row_wise(k, epsilon, alpha, t_multiplier)
    if params.vacuous_bound:
        logger.warning(
            f"Row-wise failure bound is {unclamped:.4g} at t_multiplier={t_multiplier}: "
            "the privacy guarantee holds with no stated probability; raise --t-multiplier above 1"
        )
    return params


def calibrate(
    mode: PrivacyMode,
    k: int,
    epsilon: float,
    d: Optional[int] = None,
    alpha: Optional[float] = None,
    t_multiplier: Optional[float] = None,
) -> PrivacyParams:
    """Dispatch on the privacy mode."""
    mode = PrivacyMode(mode)
    if mode == PrivacyMode.ELEMENT_WISE:
        if d is None:
            raise CalibrationError("element-wise calibration needs the data dimension d")
        return calibrate_element_wise(k, epsilon, d)
    return calibrate_row_wise(
        k,
        epsilon,
        DEFAULT_ALPHA if alpha is None else alpha,
        DEFAULT_T_MULTIPLIER if t_multiplier is None else t_multiplier,
    )


def check_calibration(params: PrivacyParams) -> None:
    """Recompute the derived constants from the primaries and compare.

    Raises CalibrationError on any mismatch beyond 1e-12 relative. Logs nothing:
    the vacuous-bound warning belongs to the original calibration.
    """
    if params.mode == PrivacyMode.ELEMENT_WISE:
        if params.d is None:
            raise CalibrationError("element-wise parameters are missing the data dimension d")
        expected, _ = _element_wise(params.k, params.epsilon, params.d)
    else:
        if params.alpha is None or params.t_multiplier is None:
            raise CalibrationError("row-wise parameters are missing alpha or t_multiplier")
        expected, _ = _row_wise(params.k, params.epsilon, params.alpha, params.t_multiplier)
    for name in ("c", "b", "sigma2", "failure_bound", "t"):
        stored, derived = getattr(params, name), getattr(expected, name)
        if stored is None and derived is None:
            continue
        if stored is None or derived is None or not math.isclose(stored, derived, rel_tol=_REL_TOL, abs_tol=0.0):
            raise CalibrationError(f"{name}={stored} does not match the calibrated value {derived}")
    if params.vacuous_bound != expected.vacuous_bound:
        raise CalibrationError(f"vacuous_bound={params.vacuous_bound} but calibration gives {expected.vacuous_bound}")
