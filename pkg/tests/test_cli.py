import json
from pathlib import Path

import numpy as np
import pytest

from wcluster import MeasureCollection, load_measures, save_measures
from wcluster.cli import main
from wcluster.measures import measure_to_obj

from synthdata import planted_blob_measures
from test_clustering import same_partition

DATA = Path(__file__).parent / "data"


def write_measure(path, mean, cov, label=None):
    from wcluster import GaussianMeasure

    obj = measure_to_obj(GaussianMeasure(np.asarray(mean, float), np.asarray(cov, float)), label)
    path.write_text(json.dumps(obj))


@pytest.fixture
def planted_file(tmp_path):
    rng = np.random.default_rng(3)
    coll, truth = planted_blob_measures(rng, centers=(0.0, 30.0), per_cluster=4, spread=0.5)
    labeled = MeasureCollection(coll.measures, tuple(f"e{i}" for i in range(len(coll))))
    path = tmp_path / "measures.json"
    save_measures(labeled, path)
    return path, truth


class TestIngestCommand:
    def run_ingest(self, tmp_path, *extra):
        out = tmp_path / "out"
        code = main(
            ["ingest", "--input", str(DATA / "panel.csv"), "--periods", str(DATA / "periods.csv"), "--out", str(out), *extra]
        )
        return code, out

    def test_writes_period_json(self, tmp_path):
        code, out = self.run_ingest(tmp_path)
        assert code == 0
        coll = load_measures(out / "P1.json")
        assert coll.labels == ("A", "B", "C")
        assert np.array_equal(coll[0].mean, np.array([2.0, 2.0]))
        assert np.array_equal(coll[0].cov, np.array([[1.0, 0.5], [0.5, 1.0]]))
        assert (out / "manifest.json").exists()

    def test_byte_identical_across_runs(self, tmp_path):
        _, out1 = self.run_ingest(tmp_path / "a")
        _, out2 = self.run_ingest(tmp_path / "b")
        assert (out1 / "P1.json").read_bytes() == (out2 / "P1.json").read_bytes()

    def test_strict_bad_row_exits_2(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("entity,date,v1\nX,2020-01-01,1\nX,2020-02-30,2\n")
        code = main(
            ["ingest", "--input", str(bad), "--periods", str(DATA / "periods.csv"), "--out", str(tmp_path / "o"), "--strict"]
        )
        assert code == 2

    def test_denominator_flag_scales_covariance(self, tmp_path):
        _, strict = self.run_ingest(tmp_path / "a", "--cov-denominator", "n-1")
        _, loose = self.run_ingest(tmp_path / "b", "--cov-denominator", "n")
        a = load_measures(strict / "P1.json")[0].cov
        b = load_measures(loose / "P1.json")[0].cov
        assert np.allclose(b * 3, a * 2, rtol=1e-15)  # 3 rows per entity

    def test_missing_file_exits_2(self, tmp_path):
        code = main(
            ["ingest", "--input", str(tmp_path / "nope.csv"), "--periods", str(DATA / "periods.csv"), "--out", str(tmp_path / "o")]
        )
        assert code == 2


class TestClusterCommand:
    def test_planted_partition_recovered(self, tmp_path, planted_file):
        path, truth = planted_file
        out = tmp_path / "out"
        code = main(
            ["cluster", "--measures", str(path), "--k", "2", "--seed", "0", "--restarts", "5", "--out", str(out)]
        )
        assert code == 0
        rows = (out / "assignments.csv").read_text().strip().splitlines()
        assert rows[0] == "label,cluster"
        labels = [int(r.split(",")[1]) for r in rows[1:]]
        assert same_partition(labels, truth)
        centers = load_measures(out / "centers.json")
        assert len(centers) == 2

    def test_k_equals_n_reports_total_one(self, tmp_path, planted_file):
        path, _ = planted_file
        out = tmp_path / "out"
        code = main(
            ["cluster", "--measures", str(path), "--k", "8", "--seed", "1", "--reports", "--out", str(out)]
        )
        assert code == 0
        reports = json.loads((out / "reports.json").read_text())
        assert reports["gci_total"] == 1.0
        rows = (out / "assignments.csv").read_text().strip().splitlines()
        assert rows[0] == "label,cluster,tau,sigma,sigma_tilde,s,tau_tilde"
        assert len(set(r.split(",")[1] for r in rows[1:])) == 8

    def test_same_seed_byte_identical(self, tmp_path, planted_file):
        path, _ = planted_file
        outs = []
        for name in ("a", "b"):
            out = tmp_path / name
            main(["cluster", "--measures", str(path), "--k", "2", "--seed", "7", "--reports", "--out", str(out)])
            outs.append((out / "assignments.csv").read_bytes())
        assert outs[0] == outs[1]

    def test_k_too_large_exits_3(self, tmp_path, planted_file):
        path, _ = planted_file
        code = main(["cluster", "--measures", str(path), "--k", "40", "--out", str(tmp_path / "o")])
        assert code == 3

    def test_malformed_measures_exits_2(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        code = main(["cluster", "--measures", str(bad), "--k", "2", "--out", str(tmp_path / "o")])
        assert code == 2


class TestGciScanCommand:
    def test_single_k_degenerate(self, tmp_path, planted_file):
        path, _ = planted_file
        out = tmp_path / "scan.csv"
        code = main(["gci-scan", "--measures", str(path), "--kmin", "1", "--kmax", "1", "--out", str(out)])
        assert code == 0
        rows = out.read_text().strip().splitlines()
        assert rows[0] == "K,gci_total,gci_1,degenerate"
        assert len(rows) == 2
        assert rows[1].split(",")[0] == "1"
        assert rows[1].split(",")[-1] == "1"  # degeneracy flag set

    def test_scan_curve_and_kmax_n(self, tmp_path, planted_file):
        path, _ = planted_file
        out = tmp_path / "scan.csv"
        code = main(
            ["gci-scan", "--measures", str(path), "--kmin", "2", "--kmax", "8", "--seed", "0", "--out", str(out)]
        )
        assert code == 0
        rows = out.read_text().strip().splitlines()
        assert len(rows) == 8  # header + K=2..8
        last = rows[-1].split(",")
        assert last[0] == "8"
        assert float(last[1]) == 1.0  # K = n

    def test_suggest_k_printed(self, tmp_path, planted_file, capsys):
        path, _ = planted_file
        out = tmp_path / "scan.csv"
        code = main(
            ["gci-scan", "--measures", str(path), "--kmin", "2", "--kmax", "4", "--seed", "0", "--suggest-k", "--out", str(out)]
        )
        assert code == 0
        printed = capsys.readouterr().out
        assert "suggested_k=" in printed

    def test_bad_range_exits_3(self, tmp_path, planted_file):
        path, _ = planted_file
        code = main(["gci-scan", "--measures", str(path), "--kmin", "2", "--kmax", "99", "--out", str(tmp_path / "s.csv")])
        assert code == 3


class TestDistanceCommand:
    def test_identical_files_print_zero(self, tmp_path, capsys):
        a = tmp_path / "a.json"
        write_measure(a, [0.0, 1.0], [[1.0, 0.2], [0.2, 2.0]])
        code = main(["distance", "--a", str(a), "--b", str(a)])
        assert code == 0
        assert capsys.readouterr().out.strip() == "0.00000"

    def test_one_dimensional_value(self, tmp_path, capsys):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        write_measure(a, [0.0], [[1.0]])
        write_measure(b, [3.0], [[4.0]])
        code = main(["distance", "--a", str(a), "--b", str(b)])
        assert code == 0
        assert capsys.readouterr().out.strip() == "3.16228"

    def test_bures_ignores_locations(self, tmp_path, capsys):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        write_measure(a, [5.0, 5.0], [[1.0, 0.0], [0.0, 4.0]])
        write_measure(b, [-5.0, 0.0], [[4.0, 0.0], [0.0, 9.0]])
        code = main(["distance", "--a", str(a), "--b", str(b), "--bures"])
        assert code == 0
        assert capsys.readouterr().out.strip() == f"{np.sqrt(2.0):.5f}"


class TestBarycenterCommand:
    def test_single_measure_echoed(self, tmp_path):
        src = tmp_path / "m.json"
        write_measure(src, [1.0, 2.0], [[2.0, 0.5], [0.5, 1.0]], label="x")
        measures = tmp_path / "coll.json"
        measures.write_text(json.dumps([json.loads(src.read_text())]))
        out = tmp_path / "bary.json"
        code = main(["barycenter", "--measures", str(measures), "--out", str(out)])
        assert code == 0
        obj = json.loads(out.read_text())
        assert obj["mean"] == [1.0, 2.0]
        assert np.allclose(obj["cov"], [[2.0, 0.5], [0.5, 1.0]], atol=1e-9)
        assert (tmp_path / "bary.json.manifest.json").exists()

    def test_weighted_pair(self, tmp_path):
        measures = tmp_path / "coll.json"
        objs = [
            {"mean": [0.0], "cov": [[1.0]]},
            {"mean": [2.0], "cov": [[9.0]]},
        ]
        measures.write_text(json.dumps(objs))
        out = tmp_path / "bary.json"
        code = main(["barycenter", "--measures", str(measures), "--weights", "0.5,0.5", "--out", str(out)])
        assert code == 0
        obj = json.loads(out.read_text())
        assert obj["mean"] == [1.0]
        assert np.allclose(obj["cov"], [[4.0]], atol=1e-9)

    def test_bad_weights_exit_3(self, tmp_path):
        measures = tmp_path / "coll.json"
        measures.write_text(json.dumps([{"mean": [0.0], "cov": [[1.0]]}]))
        code = main(["barycenter", "--measures", str(measures), "--weights", "0.5,0.6", "--out", str(tmp_path / "b.json")])
        assert code == 3
        code = main(["barycenter", "--measures", str(measures), "--weights", "oops", "--out", str(tmp_path / "b.json")])
        assert code == 3


class TestPipeline:
    def test_ingest_then_cluster(self, tmp_path):
        # full pipeline over generated panel rows with two planted regimes
        from synthdata import planted_panel_rows, write_panel_csv

        rng = np.random.default_rng(11)
        coll, truth = planted_blob_measures(rng, centers=(0.0, 40.0), per_cluster=3, spread=0.5, d=2)
        labeled = MeasureCollection(coll.measures, tuple(f"e{i}" for i in range(len(coll))))
        panel = tmp_path / "panel.csv"
        write_panel_csv(panel, planted_panel_rows(rng, labeled, rows_per_entity=30), dim=2)
        periods = tmp_path / "periods.csv"
        periods.write_text("name,start,end\nall,2019-01-01,2021-12-31\n")

        out = tmp_path / "measures"
        assert main(["ingest", "--input", str(panel), "--periods", str(periods), "--out", str(out)]) == 0

        clust = tmp_path / "clusters"
        assert (
            main(["cluster", "--measures", str(out / "all.json"), "--k", "2", "--seed", "0", "--restarts", "5", "--out", str(clust)])
            == 0
        )
        rows = (clust / "assignments.csv").read_text().strip().splitlines()[1:]
        labels = [int(r.split(",")[1]) for r in rows]
        assert same_partition(labels, truth)
