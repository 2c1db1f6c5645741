import json
import math

import numpy as np
import pytest

from satocensus import cli
from satocensus.experiments import (
    ExperimentReport,
    PatternConstraint,
    build_trace_cloud,
    cached_census,
    cmd_2dst,
    cmd_gekeler_verify,
    cmd_isogeny_dist,
    cmd_prime_seq,
    cmd_strong_st,
    cmd_truncation,
    cmd_vertical_st,
    find_primes_with_pattern,
)


def test_find_primes_examples():
    c = PatternConstraint(((3, 1),), "1mod8")
    assert find_primes_with_pattern(c, 3) == [73, 97, 193]
    c = PatternConstraint((), "3mod4")
    assert find_primes_with_pattern(c, 2, start=2) == [3, 7]


def test_constraint_validation():
    with pytest.raises(ValueError):
        PatternConstraint(((3, 1), (3, -1)))
    with pytest.raises(ValueError):
        PatternConstraint(((2, 1),))
    with pytest.raises(ValueError):
        PatternConstraint(((3, 2),))
    with pytest.raises(ValueError):
        PatternConstraint((), "7mod8")


def test_verify_single_prime():
    rep = cmd_gekeler_verify(5, 5)
    assert rep.stats["traces_checked"] == 9
    assert rep.stats["mismatches"] == []
    assert rep.stats["primes_checked"] == 1


def test_verify_skips_non_primes():
    rep = cmd_gekeler_verify(4, 10)
    assert rep.stats["primes_checked"] == 2  # 5 and 7
    assert rep.stats["mismatches"] == []
    with pytest.raises(ValueError):
        cmd_gekeler_verify(5, 501)


def test_trace_cloud_marginal_uniform():
    census = cached_census(10007)
    cloud = build_trace_cloud(census)
    assert len(set(cloud.masses)) == 1  # exactly uniform over traces
    assert cloud.n == 2 * census.trace_bound + 1


def test_vertical_experiment(tmp_path):
    rep = cmd_vertical_st(10007, 50, out_dir=tmp_path)
    assert 0 < rep.stats["sup_deviation"] < 0.05
    assert any(str(p).endswith(".csv") for p in rep.artifacts)
    data = json.loads((tmp_path / "vertical_10007_50.json").read_text())
    assert data["stats"]["sup_deviation"] == rep.stats["sup_deviation"]


def test_strong_experiment():
    rep = cmd_strong_st(10007, 0.2)
    assert rep.params["window"] == math.ceil(10007**0.2)
    assert rep.stats["sup_error"] > 0
    with pytest.raises(ValueError):
        cmd_strong_st(10007, 0.6)


def test_strong_wider_windows_average_more():
    # near-single-trace windows see the raw count fluctuations
    narrow = cmd_strong_st(10007, 0.05).stats["sup_error"]
    wide = cmd_strong_st(10007, 0.49).stats["sup_error"]
    assert wide < narrow


def test_2d_experiment_deterministic():
    a = cmd_2dst(10007, n_samples=4000, seed=5, w1_heu_cap=128, exact_cap=100)
    b = cmd_2dst(10007, n_samples=4000, seed=5, w1_heu_cap=128, exact_cap=100)
    assert a.stats == b.stats  # bit-for-bit
    c = cmd_2dst(10007, n_samples=4000, seed=6, w1_heu_cap=128, exact_cap=100)
    assert c.stats != a.stats
    assert a.stats["ks_x_marginal"] < 1.63 / math.sqrt(4000)
    assert a.stats["prokhorov_exact_subsampled"] <= a.stats["prokhorov_upper"] + 0.05
    with pytest.raises(ValueError):
        cmd_2dst(997)


def test_prime_seq_experiment():
    groups = [
        PatternConstraint(((3, 1),), "3mod4"),
        PatternConstraint(((3, 1),), "5mod8"),
    ]
    rep = cmd_prime_seq(groups, count=2, l1=5, k=2)
    assert rep.stats["intra_max_distance"] == [0.0, 0.0]
    (_, cross), = rep.stats["cross_min_distance"]
    assert cross > 0.01


def test_isogeny_experiment(tmp_path):
    rep = cmd_isogeny_dist(10007, n_samples=4000, out_dir=tmp_path)
    assert abs(rep.stats["mean_normalized"] - 0.5) < 0.01
    assert rep.stats["w1_to_heuristic"] < 0.2
    csvs = [a for a in rep.artifacts if a.endswith(".csv")]
    assert csvs and "size_num" in open(csvs[0]).read().splitlines()[0]


def test_isogeny_distance_does_not_increase_with_p():
    small = cmd_isogeny_dist(10007, n_samples=8000, seed=2).stats
    big = cmd_isogeny_dist(1000003, n_samples=8000, seed=2, threads=2).stats
    assert big["w1_to_heuristic"] <= small["w1_to_heuristic"]


def test_truncation_experiment():
    rep = cmd_truncation(10007, (10, 100), count=50, seed=3)
    med = rep.stats["median_rel_error"]
    assert med["100"] < med["10"]
    assert 0 <= rep.stats["exceptions_at_max_l0"] <= 50


def test_report_roundtrip(tmp_path):
    rep = ExperimentReport("demo", {"p": 5}, {"x": 1.5}, [], 0.1)
    path = rep.save(tmp_path)
    data = json.loads(path.read_text())
    assert data["params"] == {"p": 5} and data["stats"] == {"x": 1.5}


def test_cli_classno(capsys):
    assert cli.main(["classno", "--delta=-16"]) == 0
    assert capsys.readouterr().out.strip() == "3/2"


def test_cli_census(capsys):
    assert cli.main(["census", "--p", "5"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "t,weighted_num,weighted_den,unweighted"
    assert "0,2,1,2" in out


def test_cli_ydist_and_zdist(capsys):
    assert cli.main(["ydist", "--l", "3", "--p", "7"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("value_num,value_den,mass_num,mass_den")
    assert cli.main(["zdist", "--p", "11", "--l1", "4", "--k", "2"]) == 0
    out = capsys.readouterr().out
    assert '"support": 6' in out


def test_cli_metric(tmp_path, capsys):
    from fractions import Fraction as F

    from satocensus.metric import PointCloud, write_cloud_csv

    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    write_cloud_csv(PointCloud(np.array([[0.0]]), (F(1),)), a)
    write_cloud_csv(PointCloud(np.array([[0.3]]), (F(1),)), b)
    assert cli.main(["metric", str(a), str(b)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["exact"] == 0.3 and out["w1"] == 0.3


def test_cli_verify(capsys):
    assert cli.main(["verify", "--pmin", "5", "--pmax", "13"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["stats"]["mismatches"] == []
