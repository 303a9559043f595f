"""Command-line behavior: exit codes, file formats, determinism."""

import csv
import json
import math

import numpy as np
import pytest

from relu_dissect.cli import main
from relu_dissect.geometry import HPolyhedron, contains
from relu_dissect.network import DenseLayer, Network, ReLULayer, save_network
from relu_dissect.pwa import eval_pwa, load_pwa

from test_verify import fig3a_like_net


@pytest.fixture
def fig3a_paths(tmp_path):
    net = fig3a_like_net(seed=29)
    net_path = tmp_path / "net.json"
    save_network(net, net_path)
    pwa_path = tmp_path / "pwa.json"
    assert main(["convert", "--network", str(net_path), "--out", str(pwa_path)]) == 0
    return net, net_path, pwa_path


def identity_net(dim=2):
    return Network(dim, [DenseLayer(np.eye(dim), np.zeros(dim))])


class TestConvert:
    def test_three_neuron_layer_gives_seven_regions(self, fig3a_paths):
        _, _, pwa_path = fig3a_paths
        pwa = load_pwa(pwa_path)
        assert len(pwa) == 7

    def test_dense_only_single_region(self, tmp_path):
        net_path = tmp_path / "net.json"
        save_network(identity_net(), net_path)
        out = tmp_path / "out.json"
        assert main(["convert", "--network", str(net_path), "--out", str(out)]) == 0
        assert len(load_pwa(out)) == 1

    def test_worker_counts_agree_byte_for_byte(self, tmp_path):
        from relu_dissect.network import random_network

        net_path = tmp_path / "net.json"
        save_network(random_network(2, [5, 3], 2, seed=71), net_path)
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert main(["convert", "--network", str(net_path), "--out", str(a), "--workers", "1"]) == 0
        assert main(["convert", "--network", str(net_path), "--out", str(b), "--workers", "2"]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_workers_env_fallback(self, tmp_path, monkeypatch):
        net_path = tmp_path / "net.json"
        save_network(fig3a_like_net(seed=29), net_path)
        out = tmp_path / "out.json"
        monkeypatch.setenv("RELU_DISSECT_WORKERS", "1")
        assert main(["convert", "--network", str(net_path), "--out", str(out)]) == 0
        assert len(load_pwa(out)) == 7

    def test_schema_error_exit_1(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"input_dim": 2, "layers": [{"type": "conv"}]}))
        assert main(["convert", "--network", str(bad), "--out", str(tmp_path / "x.json")]) == 1

    def test_conversion_error_exit_2(self, tmp_path):
        net_path = tmp_path / "net.json"
        save_network(fig3a_like_net(seed=79), net_path)
        out = tmp_path / "x.json"
        assert main(["convert", "--network", str(net_path), "--out", str(out), "--box", "-1"]) == 2


class TestVerifyAndCount:
    def test_verify_clean_conversion_exit_0(self, fig3a_paths, capsys):
        _, net_path, pwa_path = fig3a_paths
        code = main(
            ["verify", "--network", str(net_path), "--pwa", str(pwa_path), "--samples", "2000"]
        )
        assert code == 0
        reports = json.loads(capsys.readouterr().out)
        assert [r["op"] for r in reports] == ["equivalence", "partition", "continuity", "count"]
        assert all(r["pass"] for r in reports)

    def test_verify_tampered_pwa_exit_5(self, fig3a_paths, tmp_path, capsys):
        _, net_path, pwa_path = fig3a_paths
        doc = json.loads(pwa_path.read_text())
        doc["regions"][0]["P"][0][0] += 1e-3
        bad = tmp_path / "tampered.json"
        bad.write_text(json.dumps(doc))
        code = main(["verify", "--network", str(net_path), "--pwa", str(bad), "--samples", "4000"])
        assert code == 5
        reports = json.loads(capsys.readouterr().out)
        assert not all(r["pass"] for r in reports)

    def test_verify_mismatched_inputs_exit_2(self, fig3a_paths, tmp_path):
        _, _, pwa_path = fig3a_paths
        other = tmp_path / "other.json"
        save_network(identity_net(3), other)
        assert main(["verify", "--network", str(other), "--pwa", str(pwa_path)]) == 2

    def test_count_reports_seven(self, fig3a_paths, capsys):
        _, net_path, pwa_path = fig3a_paths
        assert main(["count", "--network", str(net_path), "--pwa", str(pwa_path)]) == 0
        rep = json.loads(capsys.readouterr().out)
        assert rep["region_count"] == 7
        assert rep["per_layer_counts"] == [7]


class TestExport:
    def test_plain_rewrite_is_identity(self, fig3a_paths, tmp_path):
        _, _, pwa_path = fig3a_paths
        out = tmp_path / "re.json"
        assert main(["export", "--pwa", str(pwa_path), "--out", str(out)]) == 0
        assert out.read_bytes() == pwa_path.read_bytes()

    def test_remove_redundant_preserves_values(self, fig3a_paths, tmp_path):
        _, _, pwa_path = fig3a_paths
        out = tmp_path / "slim.json"
        code = main(["export", "--pwa", str(pwa_path), "--out", str(out), "--remove-redundant"])
        assert code == 0
        fat, slim = load_pwa(pwa_path), load_pwa(out)
        assert sum(r.polyhedron.nrows for r in slim.regions) <= sum(
            r.polyhedron.nrows for r in fat.regions
        )
        rng = np.random.default_rng(0)
        for x in rng.uniform(-10, 10, size=(200, 2)):
            assert np.array_equal(eval_pwa(fat, x), eval_pwa(slim, x))


class TestPlotGrid:
    def test_identity_grid(self, tmp_path):
        net_path = tmp_path / "net.json"
        save_network(identity_net(), net_path)
        pwa_path = tmp_path / "pwa.json"
        main(["convert", "--network", str(net_path), "--out", str(pwa_path)])
        out = tmp_path / "grid.csv"
        code = main(
            ["plot-grid", "--pwa", str(pwa_path), "--out", str(out), "--resolution", "3"]
        )
        assert code == 0
        rows = list(csv.DictReader(open(out)))
        assert len(rows) == 9
        for row in rows:
            assert float(row["y0"]) == pytest.approx(float(row["x1"]), abs=1e-9)
            assert row["region"] == "0"

    def test_seven_region_indices(self, fig3a_paths, tmp_path):
        _, _, pwa_path = fig3a_paths
        out = tmp_path / "grid.csv"
        assert main(
            ["plot-grid", "--pwa", str(pwa_path), "--out", str(out), "--resolution", "60"]
        ) == 0
        rows = list(csv.DictReader(open(out)))
        assert len({row["region"] for row in rows}) == 7

    def test_grid_matches_eval(self, fig3a_paths, tmp_path):
        _, _, pwa_path = fig3a_paths
        pwa = load_pwa(pwa_path)
        out = tmp_path / "grid.csv"
        main(
            ["plot-grid", "--pwa", str(pwa_path), "--out", str(out),
             "--resolution", "7", "--output-index", "2"]
        )
        for row in csv.DictReader(open(out)):
            x = np.array([float(row["x1"]), float(row["x2"])])
            assert float(row["y2"]) == pytest.approx(eval_pwa(pwa, x)[2], abs=1e-9)

    def test_non_planar_exit_3(self, tmp_path):
        net_path = tmp_path / "net.json"
        save_network(identity_net(3), net_path)
        pwa_path = tmp_path / "pwa.json"
        main(["convert", "--network", str(net_path), "--out", str(pwa_path)])
        assert main(
            ["plot-grid", "--pwa", str(pwa_path), "--out", str(tmp_path / "g.csv")]
        ) == 3


class TestSimulate:
    def make_field(self, tmp_path, W, b=None, relu=False):
        dim = W.shape[1]
        layers = [DenseLayer(W, np.zeros(W.shape[0]) if b is None else b)]
        if relu:
            layers.append(ReLULayer())
        net_path = tmp_path / "field.json"
        save_network(Network(dim, layers), net_path)
        pwa_path = tmp_path / "field_pwa.json"
        assert main(["convert", "--network", str(net_path), "--out", str(pwa_path)]) == 0
        return pwa_path

    def test_linear_decay_matches_exponential(self, tmp_path):
        pwa_path = self.make_field(tmp_path, -np.eye(2))
        out = tmp_path / "traj.csv"
        code = main(
            ["simulate", "--pwa", str(pwa_path), "--out", str(out),
             "--x0", "1.0,2.0", "--dt", "0.001", "--steps", "1000"]
        )
        assert code == 0
        rows = list(csv.DictReader(open(out)))
        assert len(rows) == 1001
        for row in rows[::100]:
            t = float(row["t"])
            assert float(row["x1"]) == pytest.approx(1.0 * math.exp(-t), abs=1e-6)
            assert float(row["x2"]) == pytest.approx(2.0 * math.exp(-t), abs=1e-6)

    def test_zero_field_constant(self, tmp_path):
        pwa_path = self.make_field(tmp_path, np.zeros((2, 2)))
        out = tmp_path / "traj.csv"
        assert main(
            ["simulate", "--pwa", str(pwa_path), "--out", str(out),
             "--x0", "0.5,-0.25", "--dt", "0.01", "--steps", "100"]
        ) == 0
        rows = list(csv.DictReader(open(out)))
        assert all(float(r["x1"]) == 0.5 and float(r["x2"]) == -0.25 for r in rows)

    def test_escaping_trajectory_exit_4(self, tmp_path):
        pwa_path = self.make_field(tmp_path, np.eye(2))  # dx/dt = +x blows up
        out = tmp_path / "traj.csv"
        code = main(
            ["simulate", "--pwa", str(pwa_path), "--out", str(out),
             "--x0", "9.0,9.0", "--dt", "0.01", "--steps", "100"]
        )
        assert code == 4

    def test_region_switches_happen_on_facets(self, tmp_path):
        # Constant drift across the quadrant partition: the relu layer sees
        # hyperplanes x1=0 and x2=0, the zero output layer makes the field
        # (1, 0.5) everywhere, so the trajectory crosses both facets.
        net = Network(
            2,
            [
                DenseLayer(np.eye(2), np.zeros(2)),
                ReLULayer(),
                DenseLayer(np.zeros((2, 2)), np.array([1.0, 0.5])),
            ],
        )
        net_path = tmp_path / "drift.json"
        save_network(net, net_path)
        pwa_path = tmp_path / "drift_pwa.json"
        assert main(["convert", "--network", str(net_path), "--out", str(pwa_path)]) == 0
        pwa = load_pwa(pwa_path)
        out = tmp_path / "traj.csv"
        assert main(
            ["simulate", "--pwa", str(pwa_path), "--out", str(out),
             "--x0=-1.0,-0.8", "--dt", "0.002", "--steps", "1200"]
        ) == 0
        rows = list(csv.DictReader(open(out)))
        switches = 0
        for prev, cur in zip(rows, rows[1:]):
            if prev["region"] == cur["region"]:
                continue
            switches += 1
            a = np.array([float(prev["x1"]), float(prev["x2"])])
            c = np.array([float(cur["x1"]), float(cur["x2"])])
            old = pwa.regions[int(prev["region"])].polyhedron
            lo_x, hi_x = a, c
            for _ in range(60):
                mid = 0.5 * (lo_x + hi_x)
                if contains(old, mid, tol=0.0):
                    lo_x = mid
                else:
                    hi_x = mid
            crossing = 0.5 * (lo_x + hi_x)
            dists = np.abs(old.normals @ crossing + old.offsets) / old.row_norms()
            assert dists.min() < 1e-6
        assert switches == 2


class TestBench:
    def test_csv_shape_and_bounds(self, tmp_path, capsys):
        out = tmp_path / "bench.csv"
        code = main(
            ["bench", "--dims", "2", "--widths", "3", "--depths", "1",
             "--trials", "3", "--seed", "5", "--out", str(out), "--workers", "1"]
        )
        assert code == 0
        rows = list(csv.DictReader(open(out)))
        assert len(rows) == 3
        for row in rows:
            assert row["d"] == "2" and row["widths"] == "3"
            assert int(row["region_count"]) <= 7
            assert float(row["wall_time"]) >= 0.0
            assert row["workers"] == "1"

    def test_depth_zero_single_region(self, tmp_path):
        out = tmp_path / "bench.csv"
        assert main(
            ["bench", "--dims", "3", "--widths", "4", "--depths", "0",
             "--trials", "2", "--out", str(out), "--workers", "1"]
        ) == 0
        rows = list(csv.DictReader(open(out)))
        assert [r["region_count"] for r in rows] == ["1", "1"]
        assert all(r["widths"] == "none" for r in rows)
