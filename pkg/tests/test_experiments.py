import math

import numpy as np
import pytest

from experiments.distance_recovery import histogram, run_distance_recovery, sample_pairs
from experiments.std_curve import curve, released_std, run_std_curve
from experiments.table1 import MECHANISMS, PUBLISHED_ACCURACY, parse_grid, run_table1, table_rows
from privacy.errors import InvalidDataError
from privacy.rng import generator
from schemas import ExperimentKind, PrivacyMode


class TestStdCurve:
    def test_element_wise_values(self):
        element = curve(run_std_curve(), PrivacyMode.ELEMENT_WISE)
        assert element[2] == pytest.approx(math.sqrt(2.0), rel=1e-12)
        assert element[20] == pytest.approx(math.sqrt(11.0), rel=1e-12)
        ks = sorted(element)
        assert ks == list(range(2, 21))
        assert all(element[a] < element[b] for a, b in zip(ks, ks[1:]))

    def test_row_wise_values(self):
        report = run_std_curve(k_values=[20])
        row = next(r for r in report.results if r["mode"] == "row")
        assert row["b"] == pytest.approx(3.0370, abs=1e-3)
        assert row["std"] == pytest.approx(4.410, abs=1e-3)

    def test_row_spreads_more_than_element_from_k4(self):
        report = run_std_curve()
        element, row = curve(report, "element"), curve(report, "row")
        assert all(row[k] > element[k] for k in range(4, 21))

    def test_std_is_root_one_plus_twice_b_squared(self):
        for r in run_std_curve(k_values=[2, 7, 13]).results:
            assert r["std"] == released_std(r["b"])
            assert r["std"] == pytest.approx(math.sqrt(1.0 + 2.0 * r["b"] ** 2), rel=1e-15)


class TestTable1:
    def test_parse_grid(self):
        assert parse_grid("3:2, 10:3") == [(3, 2), (10, 3)]
        with pytest.raises(InvalidDataError):
            parse_grid("3-2")

    def test_small_run(self):
        report = run_table1(grid=[(3, 2)], seeds=2, seed=1, n_per_cluster=150)
        assert report.experiment == ExperimentKind.TABLE1
        assert [r["mechanism"] for r in report.results] == list(MECHANISMS)
        by_mechanism = {r["mechanism"]: r for r in report.results}
        assert by_mechanism["none"]["mean_accuracy"] >= 0.93
        for r in report.results:
            assert r["trials"] == 2
            assert 0.5 <= r["mean_accuracy"] <= 1.0
            assert r["published"] == PUBLISHED_ACCURACY[r["mechanism"]][(3, 2)]
        assert len(table_rows(report)[0]) == 9
        for r in report.results:
            assert r["delta_vs_published"] == pytest.approx(r["mean_accuracy"] - r["published"])

    def test_deterministic(self):
        first = run_table1(grid=[(10, 3)], seeds=1, seed=4, n_per_cluster=50)
        second = run_table1(grid=[(10, 3)], seeds=1, seed=4, n_per_cluster=50)
        assert first.results == second.results

    def test_config_records_blob_and_kmeans_settings(self):
        report = run_table1(grid=[(3, 2)], seeds=1, n_per_cluster=20, center_distance=6.0, kmeans_n_init=2)
        assert report.config["center_distance"] == 6.0
        assert report.config["kmeans_n_init"] == 2
        assert {"cluster_std", "kmeans_max_iter", "kmeans_tol"} <= set(report.config)

    def test_cells_off_the_published_grid(self):
        report = run_table1(grid=[(4, 2)], seeds=1, n_per_cluster=20)
        assert all(r["published"] is None and r["delta_vs_published"] is None for r in report.results)
        assert all(row[-2:] == ["", ""] for row in table_rows(report))

    def test_needs_cells_and_seeds(self):
        with pytest.raises(InvalidDataError):
            run_table1(grid=[])
        with pytest.raises(InvalidDataError):
            run_table1(grid=[(3, 2)], seeds=0)


class TestDistanceRecovery:
    def test_pairs_are_distinct_rows(self, seed):
        pairs = sample_pairs(5, 2000, generator(seed))
        assert pairs.shape == (2000, 2)
        assert np.all(pairs[:, 0] != pairs[:, 1])
        assert pairs.min() >= 0 and pairs.max() < 5

    def test_minimal_run(self):
        report, differences = run_distance_recovery(n_pairs=1, n_repeats=1, n_per_cluster=10)
        assert set(differences) == {"element", "row"}
        assert all(r["count"] == 1 for r in report.results)
        assert all(v.shape == (1,) for v in differences.values())

    def test_errors_centre_on_zero(self):
        report, _ = run_distance_recovery(n_pairs=50, n_repeats=400, n_per_cluster=100, seed=3)
        for r in report.results:
            assert abs(r["z_score"]) < 4
            assert r["count"] == 20_000

    def test_single_mode(self):
        report, differences = run_distance_recovery(
            n_pairs=2, n_repeats=5, modes=[PrivacyMode.ROW_WISE], n_per_cluster=10, exact_projection=True
        )
        assert list(differences) == ["row"]
        assert report.config["exact_projection"] is True

    def test_histogram(self):
        counts, edges = histogram(np.array([-2.0, 0.0, 0.5, 2.0]))
        assert counts.size == 101 and counts.sum() == 4
        assert (edges[0], edges[-1]) == (-2.0, 2.0)

    def test_rejects_empty_runs(self):
        with pytest.raises(InvalidDataError):
            run_distance_recovery(n_pairs=0, n_repeats=1)
