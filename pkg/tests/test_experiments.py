import csv
import io
import json
import math

import pytest

from holme_kim.core import HkParams, generate
from holme_kim.experiments import (
    EXPERIMENTS,
    ExperimentConfig,
    cherry_law,
    clustering,
    degree_bounds,
    degree_law,
    geometric_checkpoints,
    run_seed,
    run_seeds,
    vertex_clustering,
    worker_count,
)
from holme_kim.stats import snapshot_from_graph


class TestConfig:
    def test_default_grid(self):
        cps = geometric_checkpoints(10_000)
        assert cps[0] == 10 and cps[-1] == 10_000
        assert list(cps) == sorted(set(cps))
        assert 100 in cps and 1000 in cps
        assert len(cps) == 13

    @pytest.mark.parametrize("kw", [
        {"t_max": 5}, {"n_seeds": 0}, {"format": "xml"}, {"m": 1},
        {"checkpoints": (100, 50)}, {"checkpoints": (10, 20_000)},
    ])
    def test_rejects(self, kw):
        with pytest.raises(ValueError):
            ExperimentConfig(**kw)

    def test_seeds(self):
        assert ExperimentConfig(n_seeds=3, base_seed=10).seeds == [10, 11, 12]

    def test_worker_cap(self, monkeypatch):
        monkeypatch.setenv("HK_THREADS", "2")
        assert worker_count(8) == 2
        assert worker_count(1) == 1


class TestRunSeed:
    def test_snapshots_match_batch(self):
        params = HkParams(2, 0.5, 3)
        run = run_seed(params, (1, 50, 400))
        assert [s.t for s in run.snapshots] == [1, 50, 400]
        for s, T in zip(run.snapshots, (1, 50, 400)):
            assert s.counts()[:6] == snapshot_from_graph(generate(params, T)).counts()[:6]

    def test_without_stats(self):
        params = HkParams(2, 0.5, 3)
        a = run_seed(params, (100, 300), with_stats=False, tracked=(10, 200))
        b = run_seed(params, (100, 300))
        assert a.max_degree == b.max_degree
        assert a.tracked[200][0] is None
        assert a.tracked[10][1] == generate(params, 300).degree(10)

    def test_scatter(self):
        params = HkParams(2, 0.5, 3)
        run = run_seed(params, (2000,), scatter_threshold=30)
        assert run.scatter
        for v, d, x in run.scatter:
            assert d >= 30 and 0 < x <= 2 * 2 * d / (d - 1)

    def test_parallel_equals_serial(self, monkeypatch):
        cfg = ExperimentConfig(t_max=500, n_seeds=3, checkpoints=(100, 500))
        monkeypatch.setenv("HK_THREADS", "1")
        serial = run_seeds(cfg)
        monkeypatch.setenv("HK_THREADS", "2")
        par = run_seeds(cfg)
        assert [[s.counts() for s in r.snapshots] for r in serial] == \
               [[s.counts() for s in r.snapshots] for r in par]


@pytest.fixture(scope="module")
def small():
    cfg = ExperimentConfig(m=2, p=0.5, t_max=3000, n_seeds=4, base_seed=1, checkpoints=(300, 1000, 3000))
    return cfg, run_seeds(cfg)


class TestExperiments:
    def test_degree_law(self, small):
        cfg, runs = small
        res = degree_law(cfg, d_report_max=6, runs=runs)
        final = {r["d"]: r for r in res.rows if r["t"] == 3000}
        assert final[2]["limit"] == 0.5
        assert final[3]["limit"] == pytest.approx(0.2)
        assert all(r["abs_error"] >= 0 for r in res.rows)
        assert abs(final[2]["mean_frac"] - 0.5) < 0.05

    def test_cherry_law(self, small):
        cfg, runs = small
        res = cherry_law(cfg, runs=runs)
        assert res.summary["limit"] == 3.0
        assert all(0 < r["ratio"] < math.inf for r in res.rows)
        assert sum(r["seed"] == "median" for r in res.rows) == 3

    def test_clustering(self, small):
        cfg, runs = small
        res = clustering(cfg, runs=runs)
        for r in res.rows:
            assert 0 <= r["c_loc"] <= 1 and 0 <= r["c_glo"] <= 1
            assert r["c_glo_log_t"] == pytest.approx(r["c_glo"] * math.log(r["t"]))

    def test_degree_bounds(self):
        cfg = ExperimentConfig(t_max=2000, n_seeds=5, checkpoints=(100, 2000))
        res = degree_bounds(cfg, tracked_vertex=10)
        assert all(r["dmax_bound_mt"] for r in res.rows)
        assert all(r["tracked_stderr"] > 0 for r in res.rows)

    def test_vertex_clustering(self):
        cfg = ExperimentConfig(t_max=5000, n_seeds=2)
        res = vertex_clustering(cfg, degree_threshold=40)
        assert res.summary["count"] == len(res.rows) > 0
        assert res.summary["max"] <= 4 * cfg.m

    def test_registry(self):
        assert set(EXPERIMENTS) == {"degree-law", "cherry-law", "clustering", "degree-bounds", "vertex-clustering"}

    def test_outputs(self, small, tmp_path):
        cfg, runs = small
        res = clustering(cfg, runs=runs)
        buf = io.StringIO()
        res.write_csv(buf)
        rows = list(csv.DictReader(io.StringIO(buf.getvalue())))
        assert len(rows) == len(res.rows)
        assert float(rows[0]["c_loc"]) == res.rows[0]["c_loc"]
        obj = json.loads(res.to_json())
        assert obj["config"]["seeds"] == [1, 2, 3, 4]
        path = tmp_path / "out.json"
        res.write(str(path), "json")
        assert json.loads(path.read_text()) == obj

    def test_write_error_has_path(self, small, tmp_path):
        cfg, runs = small
        bad = str(tmp_path / "nope" / "x.csv")
        with pytest.raises(OSError, match="nope"):
            clustering(cfg, runs=runs).write(bad)
