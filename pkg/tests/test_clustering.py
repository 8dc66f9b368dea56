import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from experiments.clustering import _lloyd, clustering_accuracy, kmeans
from experiments.datagen import make_blobs
from privacy.errors import DimensionMismatchError, InvalidDataError
from privacy.rng import derive_stream
from privacy.types import DataMatrix


def test_two_points_two_clusters(seed):
    result = kmeans(DataMatrix([[0.0, 0.0], [5.0, 5.0]]), 2, rng=seed)
    assert result.inertia == 0.0
    assert sorted(result.assignments.tolist()) == [0, 1]


def test_identical_points_one_cluster(seed):
    x = DataMatrix(np.tile([1.5, -2.0, 3.0], (6, 1)))
    result = kmeans(x, 1, rng=seed)
    assert result.inertia == 0.0
    np.testing.assert_array_equal(result.centroids[0], [1.5, -2.0, 3.0])


@pytest.mark.parametrize("run", range(20))
def test_well_separated_blobs_are_recovered(seed, run):
    dataset = make_blobs(25, 3, cluster_std=0.1, rng=derive_stream(seed, run))
    result = kmeans(dataset.data, 2, rng=derive_stream(seed, 100 + run))
    assert clustering_accuracy(result.assignments, dataset.labels) == 1.0


def test_inertia_history_does_not_increase(seed):
    dataset = make_blobs(200, 5, rng=seed)
    history = kmeans(dataset.data, 2, n_init=1, rng=seed).inertia_history
    assert all(b <= a * (1 + 1e-12) for a, b in zip(history, history[1:]))


def test_deterministic(seed):
    x = make_blobs(100, 3, rng=seed).data
    first, second = kmeans(x, 2, rng=seed), kmeans(x, 2, rng=seed)
    assert np.array_equal(first.assignments, second.assignments)
    assert first.inertia == second.inertia


def test_empty_cluster_is_reseeded():
    values = np.array([[0.0, 0.0], [0.0, 1.0], [10.0, 0.0], [10.0, 1.0]])
    result = _lloyd(values, np.array([[0.0, 0.5], [1000.0, 1000.0]]), max_iter=50, tol=0.0)
    assert sorted(np.bincount(result.assignments).tolist()) == [2, 2]
    assert result.inertia == pytest.approx(1.0)


@pytest.mark.parametrize("k_clusters", [0, 5])
def test_cluster_count_bounds(seed, k_clusters):
    with pytest.raises(InvalidDataError):
        kmeans(DataMatrix(np.zeros((4, 2))), k_clusters, rng=seed)


class TestAccuracy:
    def test_identity_and_flip(self):
        labels = [0, 0, 1, 1]
        assert clustering_accuracy(labels, labels) == 1.0
        assert clustering_accuracy([1, 1, 0, 0], labels) == 1.0

    def test_partial(self):
        assert clustering_accuracy([0, 0, 1, 0], [0, 0, 1, 1]) == 0.75

    def test_never_below_half(self):
        assert clustering_accuracy([0, 1, 0, 1], [0, 0, 1, 1]) == 0.5

    def test_length_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            clustering_accuracy([0, 1], [0, 1, 1])

    def test_more_than_two_classes(self):
        with pytest.raises(InvalidDataError):
            clustering_accuracy([0, 1, 2], [0, 1, 1])

    @given(st.lists(st.integers(0, 1), min_size=1, max_size=40), st.lists(st.integers(0, 1), min_size=40, max_size=40))
    def test_invariant_under_relabelling(self, assignments, labels):
        labels = labels[: len(assignments)]
        flipped = [1 - a for a in assignments]
        assert clustering_accuracy(assignments, labels) == clustering_accuracy(flipped, labels)


def test_random_stream_is_required():
    with pytest.raises(TypeError):
        kmeans(DataMatrix([[0.0, 0.0], [5.0, 5.0]]), 2)
