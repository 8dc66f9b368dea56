import numpy as np
import pytest

from experiments.datagen import blob_centers, make_blobs
from privacy.errors import InvalidDataError
from privacy.rng import RngSeed


def test_shape_and_balanced_labels(seed):
    dataset = make_blobs(50, 4, rng=seed)
    assert (dataset.data.rows, dataset.data.cols) == (100, 4)
    assert np.bincount(dataset.labels).tolist() == [50, 50]


def test_centers_are_the_requested_distance_apart():
    centers = blob_centers(5, 4.0)
    assert np.linalg.norm(centers[0] - centers[1]) == 4.0
    assert np.array_equal(centers.sum(axis=0), np.zeros(5))


def test_tiny_spread_puts_rows_on_their_center(seed):
    dataset = make_blobs(20, 3, cluster_std=1e-9, rng=seed)
    offsets = dataset.data.values - dataset.centers[dataset.labels]
    assert np.max(np.abs(offsets)) < 1e-6


def test_empirical_center_distance(seed):
    dataset = make_blobs(20_000, 3, rng=seed)
    means = [dataset.data.values[dataset.labels == c].mean(axis=0) for c in (0, 1)]
    assert np.linalg.norm(means[0] - means[1]) == pytest.approx(4.0, rel=0.02)


def test_per_coordinate_variance(seed):
    dataset = make_blobs(10_000, 10, rng=seed)
    offsets = dataset.data.values - dataset.centers[dataset.labels]
    np.testing.assert_allclose(offsets.var(axis=0), np.ones(10), rtol=0.05)


def test_rows_are_shuffled(seed):
    labels = make_blobs(100, 2, rng=seed).labels
    assert labels[:100].sum() not in (0, 100)


def test_deterministic():
    first, second = make_blobs(10, 3, rng=RngSeed(5)), make_blobs(10, 3, rng=RngSeed(5))
    assert np.array_equal(first.data.values, second.data.values)
    assert np.array_equal(first.labels, second.labels)


@pytest.mark.parametrize("kwargs", [{"n_per_cluster": 0}, {"d": 0}, {"cluster_std": 0.0}, {"center_distance": -1.0}])
def test_rejects_bad_arguments(kwargs):
    with pytest.raises(InvalidDataError):
        make_blobs(**{"n_per_cluster": 5, "d": 2, "rng": RngSeed(0), **kwargs})


def test_random_stream_is_required():
    with pytest.raises(TypeError):
        make_blobs(10, 3)
