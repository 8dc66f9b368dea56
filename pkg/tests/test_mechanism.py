import dataclasses
import logging
import math

import numpy as np
import pytest

import privacy.mechanism as mechanism
from io_formats import build_manifest
from privacy.errors import CalibrationError, DiagnosticsDisabledError, DimensionMismatchError
from privacy.mechanism import diagnostics_active, diagnostics_enabled, release, release_with_transcript
from privacy.noise import NoiseMatrix, calibrate_element_wise, calibrate_row_wise
from privacy.recovery import recover_between
from privacy.rng import derive_stream, generator
from privacy.types import DataMatrix, ReleasedMatrix


@pytest.fixture(autouse=True)
def diagnostics_off(monkeypatch):
    monkeypatch.setattr(mechanism, "DIAGNOSTICS_ENABLED", False)


def test_release_shape(small_data, element_params, seed):
    released = release(small_data, element_params, seed)
    assert released.z.shape == (small_data.rows, element_params.k)
    assert released.params == element_params


def test_release_is_deterministic(small_data, row_params, seed):
    first = release(small_data, row_params, seed)
    assert np.array_equal(first.z, release(small_data, row_params, seed).z)
    assert not np.array_equal(first.z, release(small_data, row_params, derive_stream(seed, 9)).z)


def test_release_does_not_repeat_calibration_warnings(small_data, element_params, seed, caplog):
    assert element_params.vacuous_bound
    with caplog.at_level(logging.WARNING):
        release(small_data, element_params, seed)
    assert "no stated probability" not in caplog.text


def test_transcript_requires_diagnostics(small_data, element_params, seed):
    assert not diagnostics_active()
    with pytest.raises(DiagnosticsDisabledError):
        release_with_transcript(small_data, element_params, seed)


def test_transcript_matches_release(small_data, element_params, seed):
    with diagnostics_enabled():
        released, p, delta = release_with_transcript(small_data, element_params, seed)
    assert not diagnostics_active()
    assert np.array_equal(released.z, release(small_data, element_params, seed).z)
    assert np.array_equal(released.z, small_data.values @ p.values + delta.values)
    assert (p.d, p.k) == (small_data.cols, element_params.k)
    assert delta.values.shape == (small_data.rows, element_params.k)


def test_diagnostics_switch_from_environment(monkeypatch, small_data, element_params, seed):
    monkeypatch.setattr(mechanism, "DIAGNOSTICS_ENABLED", True)
    released, _, _ = release_with_transcript(small_data, element_params, seed)
    assert released.k == element_params.k


def test_zero_data_without_noise_releases_zero(monkeypatch, seed):
    monkeypatch.setattr(mechanism, "sample_laplace_matrix", lambda n, k, b, rng: NoiseMatrix(np.zeros((n, k)), b))
    params = calibrate_element_wise(k=3, epsilon=4.0, d=5)
    released = release(DataMatrix(np.zeros((4, 5))), params, seed)
    assert np.array_equal(released.z, np.zeros((4, 3)))


def test_noise_variance(seed):
    params = calibrate_row_wise(k=50, epsilon=4.0, alpha=1.0, t_multiplier=1.5)
    x = DataMatrix(generator(seed).normal(size=(2000, 60)))
    with diagnostics_enabled():
        _, _, delta = release_with_transcript(x, params, derive_stream(seed, 1))
    assert delta.values.size >= 100_000
    assert np.var(delta.values) == pytest.approx(params.sigma2, rel=0.05)


def test_modes_share_the_projection(small_data, seed):
    element = calibrate_element_wise(k=3, epsilon=4.0, d=small_data.cols)
    row = calibrate_row_wise(k=3, epsilon=4.0, alpha=1.0, t_multiplier=2.0)
    with diagnostics_enabled():
        _, p_element, d_element = release_with_transcript(small_data, element, seed)
        _, p_row, d_row = release_with_transcript(small_data, row, seed)
    assert np.array_equal(p_element.values, p_row.values)
    np.testing.assert_allclose(d_element.values / element.b, d_row.values / row.b, rtol=1e-12)


def test_released_matrix_holds_only_public_fields(small_data, element_params, seed):
    released = release(small_data, element_params, seed)
    assert {f.name for f in dataclasses.fields(ReleasedMatrix)} == {"z", "params"}
    manifest = build_manifest("test", seed.seed, released.params)
    keys = set(manifest.model_dump())
    assert not keys & {"projection", "p", "noise", "delta"}


def test_element_params_must_match_data_dimension(small_data, seed):
    params = calibrate_element_wise(k=3, epsilon=4.0, d=small_data.cols + 1)
    with pytest.raises(DimensionMismatchError):
        release(small_data, params, seed)


def test_tampered_params_rejected(small_data, element_params, seed):
    with pytest.raises(CalibrationError):
        release(small_data, element_params.model_copy(update={"b": element_params.b / 2}), seed)


def test_recovered_distance_is_unbiased_over_releases(seed):
    gen = generator(seed)
    x = DataMatrix(gen.normal(size=(2, 6)) * 2.0)
    params = calibrate_element_wise(k=4, epsilon=4.0, d=6)
    true = float(np.sum((x.values[0] - x.values[1]) ** 2))
    estimates = np.array(
        [recover_between(release(x, params, derive_stream(seed, r)), 0, 1).estimate for r in range(3000)]
    )
    se = float(np.std(estimates, ddof=1) / math.sqrt(estimates.size))
    assert abs(estimates.mean() - true) < 4 * se
