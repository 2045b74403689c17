import json
from pathlib import Path

import numpy as np
import pytest

from dickeprep import io
from dickeprep.cli import main


def _data_files(directory: Path) -> dict:
    return {p.relative_to(directory): p.read_bytes() for p in sorted(directory.rglob("*"))
            if p.is_file() and not p.name.endswith("manifest.json")}


@pytest.fixture(scope="module")
def solved(tmp_path_factory):
    out = tmp_path_factory.mktemp("opt")
    code = main(["optimize", "--target", "dicke:0", "--n", "4", "--p", "2", "--seed", "1", "--out", str(out)])
    assert code == 0
    return out, out / "optimize_dicke_0_n4_p2.params.json"


def test_optimize_outputs(solved):
    out, params = solved
    rec = io.read_jsonl(out / "optimize_dicke_0_n4_p2.jsonl")[0]
    assert rec["converged"] and rec["best_infidelity"] < 1e-12
    assert (out / "optimize_dicke_0_n4_p2.manifest.json").exists()
    assert json.loads(params.read_text())["p"] == 2


def test_optimize_budget_exhausted(tmp_path):
    assert main(["optimize", "--target", "dicke:0", "--n", "4", "--p", "0", "--seed", "1", "--starts", "5",
                 "--out", str(tmp_path)]) == 2


def test_usage_errors(tmp_path, capsys):
    assert main(["optimize", "--target", "ruskai-r1", "--n", "13", "--p", "4", "--seed", "1", "--out", str(tmp_path)]) == 1
    assert "N=9" in capsys.readouterr().err
    assert main(["optimize", "--target", "w", "--n", "4", "--p", "2", "--out", str(tmp_path)]) == 1  # no seed
    assert main(["sweep", "--n", "4", "--p", "x", "--seed", "1"]) == 1
    assert main(["husimi", "--seed", "1", "--grid", "1x5"]) == 1
    assert main(["bogus"]) == 1


def test_rerun_is_byte_identical(tmp_path):
    args = ["optimize", "--target", "haar:3", "--n", "5", "--p", "2", "--starts", "2", "--hops", "1", "--seed", "4"]
    main(args + ["--out", str(tmp_path / "a")])
    main(args + ["--out", str(tmp_path / "b")])
    a, b = _data_files(tmp_path / "a"), _data_files(tmp_path / "b")
    assert a and a == b


def test_noise_command(solved, tmp_path):
    _, params = solved
    code = main(["noise", "--load", str(params), "--delta-phi", "1e-3", "--realizations", "20", "--sigma", "2,20",
                 "--gamma", "31.4", "--seed", "3", "--out", str(tmp_path)])
    assert code == 0
    recs = io.read_jsonl(next(tmp_path.glob("noise_*.jsonl")))
    assert [r["model"] for r in recs] == ["intensity", "nonglobal", "nonglobal", "dephasing"]
    assert recs[0]["n_realizations"] == 20 and recs[0]["std_error"] >= 0
    header, rows = io.read_csv(next(tmp_path.glob("noise_*.csv")))
    assert header[0] == "model" and len(rows) == 4


def test_tomography_command(solved, tmp_path):
    _, params = solved
    assert main(["tomography", "--load", str(params), "--shots", "2000", "--seed", "5", "--out", str(tmp_path)]) == 0
    hist = io.read_histogram(next(tmp_path.glob("*.histogram.csv")))
    assert hist.n_shots == 2000
    rep = io.read_jsonl(next(tmp_path.glob("tomography_*.jsonl")))[0]
    assert rep["n_shots"] == 2000 and rep["proxy"] == pytest.approx(1, abs=1e-9)


def test_husimi_command(solved, tmp_path):
    _, params = solved
    assert main(["husimi", "--load", str(params), "--grid", "12x16", "--seed", "0", "--out", str(tmp_path)]) == 0
    (folder,) = [p for p in tmp_path.iterdir() if p.is_dir()]
    files = sorted(p.name for p in folder.glob("stage_*.csv"))
    assert files == ["stage_00_css.csv", "stage_01_oat1.csv", "stage_02_rot1.csv", "stage_03_oat2.csv", "stage_04_rot2.csv"]
    manifest = json.loads((folder / "husimi.manifest.json").read_text())
    assert [s["label"] for s in manifest["stages"]] == ["css", "oat1", "rot1", "oat2", "rot2"]
    grid = io.read_grid(folder / files[-1], 4)
    assert grid.values.shape == (12, 16)


def test_sweep_command(tmp_path):
    assert main(["sweep", "--n", "4", "--targets", "3", "--p", "1:4", "--seed", "9", "--out", str(tmp_path)]) == 0
    recs = io.read_jsonl(tmp_path / "sweep_n4.jsonl")
    assert len(recs) == 3 * 4 + 1 and recs[-1]["summary"]
    header, rows = io.read_csv(tmp_path / "sweep_n4.csv")
    assert header == ["N", "P", "median_infidelity", "q95_infidelity"]
    med = np.array([float(r[2]) for r in rows])
    assert np.all(np.diff(med) <= 1e-15)
