import json
import subprocess
import sys

import numpy as np
import pytest
from scipy.special import digamma

from marginodds import io
from marginodds.cli import EXIT_DIFFERENT, EXIT_ERROR, EXIT_OK, main
from marginodds.config import ExperimentConfig
from marginodds.errors import ConfigError
from marginodds.special import CFGrid


def _config(tmp_path, name="cfg.json", **over):
    d = {
        "table": [[7, 1], [1, 1]],
        "partition": "rows",
        "contrast": {"builder": "or2x2"},
        "alpha": 1.0,
        "samples": 4000,
        "seed": 0,
        "out": str(tmp_path / "out"),
    }
    d.update(over)
    path = tmp_path / name
    path.write_text(json.dumps(d))
    return path


# -- io --------------------------------------------------------------------------


def test_cf_csv_columns(tmp_path):
    t = np.array([-1.0, 0.0, 1.0])
    u = CFGrid(t, [0.5 - 0.1j, 1.0, 0.5 + 0.1j], "unconstrained")
    c = CFGrid(t, [0.5, 1.0, 0.5], "constrained")
    path = io.write_cf_pair(tmp_path / "cf.csv", u, c)
    assert path.read_text().splitlines()[0] == ",".join(io.CF_COLUMNS)
    data = io.read_csv(path)
    np.testing.assert_array_equal(data["t"], t)
    np.testing.assert_allclose(data["abs_diff"], [0.1, 0.0, 0.1])
    np.testing.assert_array_equal(data["im_u"], [-0.1, 0.0, 0.1])


def test_csv_round_trips_floats_exactly(tmp_path):
    v = np.random.default_rng(0).normal(size=50)
    io.write_csv(tmp_path / "v.csv", ("value",), ((x,) for x in v))
    assert np.array_equal(io.read_csv(tmp_path / "v.csv")["value"], v)


def test_write_json_numpy(tmp_path):
    io.write_json(tmp_path / "r.json", {"a": np.float64(1.5), "b": np.arange(3)})
    assert json.loads((tmp_path / "r.json").read_text()) == {"a": 1.5, "b": [0, 1, 2]}


def test_no_temp_files_left(tmp_path):
    io.write_csv(tmp_path / "x.csv", ("a",), [(1,)])
    assert [p.name for p in tmp_path.iterdir()] == ["x.csv"]


# -- config ----------------------------------------------------------------------


def test_config_round_trip(tmp_path):
    cfg = ExperimentConfig.load(_config(tmp_path))
    assert cfg.shape == (2, 2) and cfg.table == [7, 1, 1, 1]
    cfg.dump(tmp_path / "again.json")
    assert ExperimentConfig.load(tmp_path / "again.json") == cfg


@pytest.mark.parametrize(
    "over",
    [
        {"contrast": {"builder": "nope"}},
        {"alpha": [1.0, 2.0]},
        {"alpha": -1.0},
        {"schemes": ["sideways"]},
        {"partition": [[0, 1], [1, 2, 3]]},
        {"table": [[1, -1], [0, 2]]},
        {"seed": -1},
        {"bogus": 1},
        {"t_grid": {"tmin": 1, "tmax": 0, "tpoints": 5}},
        {"table": [1, 2, 3, 4, 5, 6], "shape": [2, 3], "schemes": ["double"]},
    ],
)
def test_config_rejects(tmp_path, over):
    with pytest.raises(ConfigError):
        ExperimentConfig.load(_config(tmp_path, **over))


def test_config_builders(tmp_path):
    cfg = ExperimentConfig.load(
        _config(tmp_path, table=list(range(1, 10)), shape=[3, 3],
                contrast={"builder": "local", "i": 1, "j": 1})
    )
    assert cfg.build_contrast().shape == (9, 1)
    assert cfg.build_partition().k == 3


# -- cli -------------------------------------------------------------------------


def test_invariance_or_exit_zero(tmp_path, capsys):
    assert main(["invariance", "--config", str(_config(tmp_path))]) == EXIT_OK
    out = capsys.readouterr().out
    assert "margin_free: True" in out and "verdict: invariant" in out


def test_invariance_half_contrast_exit_two(tmp_path, capsys):
    cfg = _config(tmp_path, table=[[2, 0], [0, 0]], contrast={"matrix": [0.5] * 4})
    assert main(["invariance", "--config", str(cfg)]) == EXIT_DIFFERENT
    assert "non-invariant" in capsys.readouterr().out


def test_invariance_n1_is_invariant(tmp_path, capsys):
    cfg = _config(tmp_path, table=[[1, 0], [0, 0]], contrast={"matrix": [0.5] * 4})
    assert main(["invariance", "--config", str(cfg)]) == EXIT_OK


def test_cli_errors_exit_one(tmp_path, capsys):
    assert main(["cf", "--config", str(tmp_path / "missing.json")]) == EXIT_ERROR
    bad = _config(tmp_path, contrast={"builder": "nope"})
    assert main(["cf", "--config", str(bad)]) == EXIT_ERROR
    with pytest.raises(SystemExit) as exc:
        main(["cf"])
    assert exc.value.code == EXIT_ERROR
    with pytest.raises(SystemExit) as exc:
        main(["nonsense", "--config", "x"])
    assert exc.value.code == EXIT_ERROR


def test_cf_command_writes_grid(tmp_path):
    cfg = _config(tmp_path)
    assert main(["cf", "--config", str(cfg), "--tmin", "-2", "--tmax", "2", "--tpoints", "5"]) == 0
    data = io.read_csv(tmp_path / "out" / "cf.csv")
    np.testing.assert_array_equal(data["t"], [-2, -1, 0, 1, 2])
    assert np.all(data["abs_diff"] < 1e-12)


def test_figure_is_reproducible(tmp_path):
    cfg = _config(tmp_path)
    main(["figure", "--config", str(cfg), "--out", str(tmp_path / "a")])
    main(["figure", "--config", str(cfg), "--out", str(tmp_path / "b")])
    for name in ("figure_row_fixed.csv", "figure_double_fixed.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    report = json.loads((tmp_path / "a" / "figure_report.json").read_text())
    assert abs(report["integral_row_fixed"] - 1) < 1e-3
    main(["figure", "--config", str(cfg), "--out", str(tmp_path / "c"), "--seed", "1"])
    assert (tmp_path / "a" / "figure_row_fixed.csv").read_bytes() != (
        tmp_path / "c" / "figure_row_fixed.csv"
    ).read_bytes()


def test_analyze_mean_matches_digamma(tmp_path):
    cfg = _config(tmp_path, samples=40_000, schemes=["unconstrained"])
    assert main(["analyze", "--config", str(cfg)]) == 0
    data = io.read_csv(tmp_path / "out" / "analyze.csv")
    a = np.array([8.0, 2.0, 2.0, 2.0])
    expected = digamma(a) @ [1, -1, -1, 1]
    assert abs(data["mean"][0] - expected) < 3 * data["sd"][0] / np.sqrt(40_000)
    assert data["q2.5"][0] < data["q50"][0] < data["q97.5"][0]


def test_analyze_zero_contrast(tmp_path):
    cfg = _config(tmp_path, contrast={"matrix": [0, 0, 0, 0]}, samples=100)
    assert main(["analyze", "--config", str(cfg)]) == 0
    data = io.read_csv(tmp_path / "out" / "analyze.csv")
    assert np.all(data["mean"] == 0) and np.all(data["sd"] == 0)


def test_analyze_dependent_scheme(tmp_path, capsys):
    cfg = _config(tmp_path, table=[[1, 1], [1, 1]], samples=1000)
    assert main(["analyze", "--config", str(cfg), "--scheme", "dependent"]) == 0
    data = io.read_csv(tmp_path / "out" / "analyze.csv")
    assert data["mean"].size == 2


def test_concentration_command(tmp_path):
    cfg = _config(tmp_path, samples=2000, n_list=[100, 1000], schemes=["unconstrained"])
    assert main(["concentration", "--config", str(cfg)]) == 0
    data = io.read_csv(tmp_path / "out" / "concentration_unconstrained.csv")
    assert data["n"].tolist() == [100, 1000]
    assert data["variance"][0] > data["variance"][1]


def test_console_entry_point(tmp_path):
    res = subprocess.run(
        [sys.executable, "-m", "marginodds.cli", "invariance", "--config", str(_config(tmp_path))],
        capture_output=True, text=True,
    )
    assert res.returncode == 0, res.stderr
