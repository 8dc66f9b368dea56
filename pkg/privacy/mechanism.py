"""
The release mechanism: Z = XP + Delta.

P ~ N(0, 1/k) entries (child stream 0 of the release seed) and
Delta ~ Laplace(0, b) entries (child stream 1). P and Delta are dropped after
use; only `release_with_transcript`, which is gated behind the diagnostics
switch, ever hands them out.
"""

import threading
from contextlib import contextmanager
from typing import Tuple

from config import DIAGNOSTICS_ENABLED
from privacy.errors import CalibrationError, DiagnosticsDisabledError, DimensionMismatchError
from privacy.noise import NoiseMatrix, check_calibration, sample_laplace_matrix
from privacy.projection import ProjectionMatrix, jl_distortion, project, sample_projection
from privacy.rng import RngSeed, derive_stream
from privacy.types import DataMatrix, ReleasedMatrix
from schemas import PrivacyMode, PrivacyParams
from utils.logger import logger

PROJECTION_STREAM = 0
NOISE_STREAM = 1

_diagnostics_lock = threading.Lock()
_diagnostics_depth = 0


@contextmanager
def diagnostics_enabled():
    """Allow `release_with_transcript` inside the block (verify suites, tests)."""
    global _diagnostics_depth
    with _diagnostics_lock:
        _diagnostics_depth += 1
    try:
        yield
    finally:
        with _diagnostics_lock:
            _diagnostics_depth -= 1


def diagnostics_active() -> bool:
    return DIAGNOSTICS_ENABLED or _diagnostics_depth > 0


def _run(x: DataMatrix, params: PrivacyParams, rng: RngSeed) -> Tuple[ReleasedMatrix, ProjectionMatrix, NoiseMatrix]:
    if not isinstance(params, PrivacyParams):
        raise CalibrationError(f"expected calibrated PrivacyParams, got {type(params).__name__}")
    check_calibration(params)
    if params.mode == PrivacyMode.ELEMENT_WISE and params.d != x.cols:
        raise DimensionMismatchError(f"params were calibrated for d={params.d} but the data has {x.cols} columns")

    p = sample_projection(x.cols, params.k, derive_stream(rng, PROJECTION_STREAM))
    y = project(x, p)
    delta = sample_laplace_matrix(x.rows, params.k, params.b, derive_stream(rng, NOISE_STREAM))
    released = ReleasedMatrix(y.values + delta.values, params)
    return released, p, delta


def release(x: DataMatrix, params: PrivacyParams, rng: RngSeed) -> ReleasedMatrix:
    released, _, _ = _run(x, params, rng)
    distortion = jl_distortion(params.k, x.rows)
    logger.debug(
        f"Released {x.rows}x{x.cols} -> {released.n}x{released.k} ({params.mode.value}, b={params.b:.6g}, "
        f"JL distortion {'unbounded' if distortion is None else f'{distortion:.3f}'})"
    )
    return released


def release_with_transcript(
    x: DataMatrix, params: PrivacyParams, rng: RngSeed
) -> Tuple[ReleasedMatrix, ProjectionMatrix, NoiseMatrix]:
    """Same Z as `release` for the same seed, plus P and Delta."""
    if not diagnostics_active():
        raise DiagnosticsDisabledError(
            "release internals are only available with DP_DIAGNOSTICS=1 or inside diagnostics_enabled()"
        )
    return _run(x, params, rng)
