"""
Matrix containers shared by every module.
Arrays are float64, copied on construction and marked read-only.
"""

from dataclasses import dataclass

import numpy as np

from privacy.errors import DimensionMismatchError, InvalidDataError
from schemas import PrivacyParams


def as_frozen_matrix(values, name: str = "matrix") -> np.ndarray:
    """Copy `values` into a read-only 2-D float64 array, rejecting NaN/Inf."""
    array = np.array(values, dtype=np.float64, copy=True)
    if array.ndim != 2:
        raise InvalidDataError(f"{name} must be 2-dimensional, got shape {array.shape}")
    if not np.all(np.isfinite(array)):
        bad = np.argwhere(~np.isfinite(array))[0]
        raise InvalidDataError(f"{name} has a non-finite value at row {bad[0]}, column {bad[1]}")
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class DataMatrix:
    """Database X: rows are records, columns are attributes."""

    values: np.ndarray

    def __post_init__(self):
        array = as_frozen_matrix(self.values, "DataMatrix")
        if array.shape[0] < 1 or array.shape[1] < 1:
            raise InvalidDataError(f"DataMatrix needs at least one row and column, got {array.shape}")
        object.__setattr__(self, "values", array)

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]

    def row(self, i: int) -> np.ndarray:
        if not 0 <= i < self.rows:
            raise IndexError(f"row {i} out of range for {self.rows} rows")
        return self.values[i]

    def col(self, j: int) -> np.ndarray:
        if not 0 <= j < self.cols:
            raise IndexError(f"column {j} out of range for {self.cols} columns")
        return self.values[:, j]


@dataclass(frozen=True)
class ReleasedMatrix:
    """The private release Z with its public metadata.

    The projection matrix and the noise matrix are deliberately not fields.
    """

    z: np.ndarray
    params: PrivacyParams

    def __post_init__(self):
        array = as_frozen_matrix(self.z, "ReleasedMatrix")
        if array.shape[1] != self.params.k:
            raise DimensionMismatchError(
                f"released matrix has {array.shape[1]} columns but params.k = {self.params.k}"
            )
        object.__setattr__(self, "z", array)

    @property
    def n(self) -> int:
        return self.z.shape[0]

    @property
    def k(self) -> int:
        return self.z.shape[1]

    def row(self, i: int) -> np.ndarray:
        if not 0 <= i < self.n:
            raise IndexError(f"row {i} out of range for {self.n} rows")
        return self.z[i]
