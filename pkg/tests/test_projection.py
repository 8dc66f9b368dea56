import logging
import math

import numpy as np
import pytest

from privacy.diagnostics import iter_projection_batches
from privacy.errors import DimensionMismatchError, InvalidDataError
from privacy.projection import ProjectionMatrix, jl_distortion, max_row_norm2, project, sample_projection
from privacy.rng import derive_stream, generator
from privacy.types import DataMatrix


def test_shape_and_determinism(seed):
    p = sample_projection(30, 5, seed)
    assert (p.d, p.k) == (30, 5)
    assert np.array_equal(p.values, sample_projection(30, 5, seed).values)
    assert not np.array_equal(p.values, sample_projection(30, 5, derive_stream(seed, 1)).values)


def test_entry_moments(seed):
    d, k = 25_000, 4
    values = sample_projection(d, k, seed).values.ravel()
    se = math.sqrt(1.0 / k / values.size)
    assert abs(values.mean()) < 4 * se
    assert values.var() == pytest.approx(1.0 / k, rel=0.05)


def test_warns_when_k_not_below_d(seed, caplog):
    with caplog.at_level(logging.WARNING):
        sample_projection(3, 4, seed)
    assert "not below the input dimension" in caplog.text


@pytest.mark.parametrize("d,k", [(0, 2), (3, 0)])
def test_rejects_non_positive_dimensions(seed, d, k):
    with pytest.raises(InvalidDataError):
        sample_projection(d, k, seed)


def test_project_zero_rows_is_zero(seed):
    p = sample_projection(8, 3, seed)
    y = project(DataMatrix(np.zeros((4, 8))), p)
    assert np.array_equal(y.values, np.zeros((4, 3)))


def test_truncated_identity_keeps_leading_columns():
    x = DataMatrix(np.arange(12, dtype=float).reshape(3, 4) - 5.5)
    p = ProjectionMatrix(np.eye(4)[:, :2])
    assert np.array_equal(project(x, p).values, x.values[:, :2])


def test_project_matches_naive_product(seed):
    x = DataMatrix(generator(seed).normal(size=(5, 7)))
    p = sample_projection(7, 3, derive_stream(seed, 1))
    naive = np.array(
        [[sum(x.values[i, t] * p.values[t, j] for t in range(7)) for j in range(3)] for i in range(5)]
    )
    np.testing.assert_allclose(project(x, p).values, naive, rtol=1e-12, atol=1e-14)


def test_project_dimension_mismatch(seed):
    with pytest.raises(DimensionMismatchError):
        project(DataMatrix(np.zeros((2, 5))), sample_projection(4, 2, seed))


def test_max_row_norm2():
    assert max_row_norm2(np.zeros((3, 4))) == 0.0
    assert max_row_norm2(np.ones((1, 9))) == 3.0
    values = np.array([[3.0, 4.0], [1.0, 1.0], [0.0, -6.0]])
    assert max_row_norm2(ProjectionMatrix(values)) == 6.0


def test_max_row_norm2_matches_loop(seed):
    values = generator(seed).normal(size=(20, 6))
    expected = max(math.sqrt(sum(v * v for v in row)) for row in values.tolist())
    assert max_row_norm2(values) == pytest.approx(expected, rel=1e-12)


def test_projection_preserves_squared_distance_in_expectation(seed):
    d, k, n = 20, 5, 40_000
    a = generator(seed).normal(size=d)
    total = 0.0
    for batch in iter_projection_batches(d, k, n, derive_stream(seed, 1)):
        projected = np.einsum("d,mdk->mk", a, batch)
        total += float(np.sum(projected * projected))
    assert total / n == pytest.approx(float(a @ a), rel=0.03)


class TestJlDistortion:
    def test_single_point_has_no_distortion(self):
        assert jl_distortion(2, 1) == 0.0

    def test_small_k_gives_no_guarantee(self):
        # 4 ln(2000) / (1/6) is about 182
        assert jl_distortion(2, 2000) is None
        assert jl_distortion(100, 2000) is None

    def test_large_k_solves_the_bound(self):
        k, n = 2000, 2000
        lam = jl_distortion(k, n)
        assert 0 < lam < 1
        assert 4 * math.log(n) / (lam**2 / 2 - lam**3 / 3) == pytest.approx(k, rel=1e-6)

    def test_more_dimensions_less_distortion(self):
        assert jl_distortion(4000, 2000) < jl_distortion(1000, 2000)

    def test_rejects_bad_k(self):
        with pytest.raises(InvalidDataError):
            jl_distortion(0, 10)


def test_entry_mean_for_a_wide_matrix(seed):
    d, k = 100, 50
    values = sample_projection(d, k, seed).values
    assert abs(values.mean()) < 4 * (1.0 / math.sqrt(d * k * k))
