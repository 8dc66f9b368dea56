"""
Johnson-Lindenstrauss projection matrices.
Entries are i.i.d. N(0, 1/k), so E||xP - yP||^2 = ||x - y||^2.
"""

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.optimize import brentq

from privacy.errors import DimensionMismatchError, InvalidDataError
from privacy.rng import RngSeed, generator
from privacy.types import DataMatrix, as_frozen_matrix
from utils.logger import logger


@dataclass(frozen=True)
class ProjectionMatrix:
    values: np.ndarray

    def __post_init__(self):
        array = as_frozen_matrix(self.values, "ProjectionMatrix")
        if array.shape[0] < 1 or array.shape[1] < 1:
            raise InvalidDataError(f"projection needs d >= 1 and k >= 1, got {array.shape}")
        object.__setattr__(self, "values", array)

    @property
    def d(self) -> int:
        return self.values.shape[0]

    @property
    def k(self) -> int:
        return self.values.shape[1]


def sample_projection(d: int, k: int, rng: RngSeed) -> ProjectionMatrix:
    if d < 1 or k < 1:
        raise InvalidDataError(f"projection dimensions must be positive, got d={d}, k={k}")
    if k >= d:
        logger.warning(f"Projection dimension k={k} is not below the input dimension d={d}")
    values = generator(rng).normal(loc=0.0, scale=1.0 / math.sqrt(k), size=(d, k))
    return ProjectionMatrix(values)


def project(x: DataMatrix, p: ProjectionMatrix) -> DataMatrix:
    """Y = XP."""
    if x.cols != p.d:
        raise DimensionMismatchError(f"cannot project {x.rows}x{x.cols} data with a {p.d}x{p.k} matrix")
    return DataMatrix(x.values @ p.values)


def max_row_norm2(p: Union[ProjectionMatrix, np.ndarray]) -> float:
    """max_i ||P_i||_2, the quantity both sensitivity lemmas are stated in."""
    values = p.values if isinstance(p, ProjectionMatrix) else np.asarray(p, dtype=np.float64)
    if values.size == 0:
        return 0.0
    return float(np.max(np.linalg.norm(values, axis=1)))


def jl_distortion(k: int, n: int) -> Optional[float]:
    """Smallest distortion Lambda in (0, 1] with k >= 4 ln n / (Lambda^2/2 - Lambda^3/3).

    Returns None when even Lambda = 1 needs more than k dimensions, i.e. the
    lemma gives no guarantee for this (k, n). Diagnostic only.
    """
    if k < 1:
        raise InvalidDataError(f"k must be positive, got {k}")
    if n <= 1:
        return 0.0
    log_n = math.log(n)

    def required_k(lam: float) -> float:
        return 4.0 * log_n / (lam**2 / 2.0 - lam**3 / 3.0) - k

    if required_k(1.0) > 0:
        return None
    return float(brentq(required_k, 1e-9, 1.0))
