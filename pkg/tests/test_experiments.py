import csv
import json
import math

import pytest

from convexbm.experiments import (
    ExperimentConfig,
    RunManifest,
    desk_M,
    euclid_proxy,
    run,
    write_csv,
)


def small(experiment, **kw):
    kw.setdefault("seeds", [0, 1])
    return ExperimentConfig(experiment, **kw)


class TestConfig:
    def test_unknown_experiment(self):
        with pytest.raises(ValueError):
            ExperimentConfig("nope")

    def test_empty_seeds(self):
        with pytest.raises(ValueError):
            ExperimentConfig("ball-inside", seeds=[])

    @pytest.mark.parametrize("key,val", [("d", 11), ("n", 4), ("m", 6), ("N", 16), ("d", 0)])
    def test_grid_caps(self, key, val):
        with pytest.raises(ValueError):
            ExperimentConfig("ball-inside", grid={key: [val]})

    def test_positive_counts(self):
        with pytest.raises(ValueError):
            ExperimentConfig("ball-inside", samples=0)

    def test_round_trip(self, tmp_path):
        cfg = small("perturbation", grid={"m": [3]}, params={"eps_max": 0.01})
        p = tmp_path / "cfg.json"
        p.write_text(json.dumps(cfg.to_dict()))
        assert ExperimentConfig.from_json(str(p)) == cfg

    def test_desk_M(self):
        # 8 N^2 ln(N^1.5) / n exceeds 4 n^2 = 36, and e^3 caps it at 20
        assert desk_M(3, 7) == 20
        assert desk_M(5, 3) == min(math.ceil(8 * 9 * math.log(3 ** 1.5) / 5), 100)


class TestCsv:
    def test_format(self, tmp_path):
        p = tmp_path / "t.csv"
        write_csv(str(p), [{"a": 1, "b": 0.1}, {"a": 2, "c": 'say "hi", twice'}])
        raw = p.read_bytes()
        assert raw.count(b"\r\n") == 3
        assert b"\n" not in raw.replace(b"\r\n", b"")
        assert raw.startswith(b"a,b,c\r\n")
        assert b'"say ""hi"", twice"' in raw
        rows = list(csv.DictReader(p.open(newline="")))
        assert rows[0] == {"a": "1", "b": "0.1", "c": ""}
        assert rows[1]["c"] == 'say "hi", twice'

    def test_float_repr(self, tmp_path):
        p = tmp_path / "t.csv"
        write_csv(str(p), [{"x": 1 / 3}])
        assert float(list(csv.DictReader(p.open(newline="")))[0]["x"]) == 1 / 3


class TestBallInside:
    def cfg(self, **kw):
        return small("ball-inside", grid={"d": [3, 5], "M_over_d": [2, 4]}, samples=200, **kw)

    def test_passes(self):
        man = run(self.cfg())
        assert man.passed
        assert man.checks == {"vertex_budget": True, "ball_inside": True}
        assert len(man.cells) == 8
        assert man.fitted["violations"] == 0
        assert 0 < man.fitted["max_exact_ratio"] <= 1

    def test_self_test_finds_violations(self):
        man = run(self.cfg(params={"radius_factor": 0.1}))
        assert man.fitted["violations"] > 0
        assert "ball_inside" not in man.checks
        assert any("self-test" in n for n in man.notes)

    def test_reproducible(self):
        a, b = run(self.cfg()), run(self.cfg())
        assert a.results_key() == b.results_key()

    def test_thread_count_invariant(self):
        a = run(self.cfg())
        b = run(self.cfg(threads=2))
        ka, kb = json.loads(a.results_key()), json.loads(b.results_key())
        ka["config"].pop("threads"), kb["config"].pop("threads")
        assert ka == kb

    def test_seed_changes_results(self):
        assert run(self.cfg()).cells != run(self.cfg(seed=1)).cells

    def test_write(self, tmp_path):
        man = run(self.cfg())
        mpath, cpath = man.write(str(tmp_path / "out"))
        doc = json.loads(open(mpath).read())
        assert doc["checks"] == man.checks and doc["config"]["experiment"] == "ball-inside"
        rows = list(csv.DictReader(open(cpath, newline="")))
        assert len(rows) == len(man.cells)
        assert set(rows[0]) >= {"d", "M", "seed", "violations", "vertices"}


def test_manifest_passed():
    man = RunManifest({}, "0", [], {}, {"a": True, "b": False}, {"t": False})
    assert not man.passed
    man.checks["b"] = True
    assert man.passed


def test_gluskin_distance_small():
    man = run(small("gluskin-distance", grid={"dM": [[3, 6]]}, restarts=2,
                    params={"pairs": 3, "max_iter": 60}))
    assert man.checks == {"lower_le_upper": True}
    assert len(man.cells) == 3
    cell = man.fitted["cells"][0]
    assert 1 <= cell["median_lower"] <= cell["median_upper"]
    lo, hi = man.fitted["a_hat_upper_ci"]
    assert lo <= hi
    assert man.trends == {}


def test_simplex_approx_small():
    man = run(small("simplex-approx", grid={"n": [3], "N": [5, 7], "m": [3, 4]}, samples=4,
                    restarts=2, params={"max_iter": 60}))
    assert man.passed, man.checks
    per = {r["N"]: r for r in man.fitted["per_N"]}
    assert per[7]["min_upper"] <= per[5]["min_upper"] + 1e-9
    assert per[7]["samples"] == 8
    lo, hi = per[7]["c_hat_ci"]
    assert lo <= hi
    assert man.fitted["M_desk"] == desk_M(3, 7)


def test_simplex_approx_rejects_m_below_n():
    with pytest.raises(ValueError):
        run(small("simplex-approx", grid={"n": [3], "N": [5], "m": [2]}, samples=1))


def test_euclid_projection_small():
    man = run(small("euclid-projection", grid={"n": [2], "N": [3, 6]}, samples=3, restarts=2,
                    params={"max_iter": 60}))
    assert man.passed
    assert len(man.fitted["cells"]) == 2
    assert "c_hat_within_factor_2" in man.trends


def test_euclid_proxy():
    assert len(euclid_proxy(2).points) == 64
    with pytest.raises(ValueError):
        euclid_proxy(4)


def test_perturbation_small():
    man = run(small("perturbation", grid={"m": [3]}, restarts=2,
                    params={"section_pairs": 2, "projection_pairs": 2, "zero_pairs": 1,
                            "max_iter": 60}))
    assert man.passed, man.checks
    assert [c["kind"] for c in man.cells] == ["section"] * 2 + ["projection"] * 2 + ["zero"]
    assert all(c["upper"] <= c["bound"] for c in man.cells)


def test_volume_bounds_small():
    man = run(small("volume-bounds", grid={"d": [3], "M_over_d": [2, 10]}, samples=2000,
                    params={"coverage_runs": 3, "sphere_runs": 2}))
    assert man.passed
    assert set(man.fitted["coverage"]) == {"cube2", "cube3", "cube4", "cross2", "cross3", "cross4"}
    assert man.fitted["C_max"] >= man.fitted["C_min"] > 0
    assert set(man.trends) == {"C_max_le_10", "spread_lt_4", "coverage_18_of_20", "gluskin_le_C_max"}
