import json
import subprocess
import sys

import pytest

from truefi.cli import main
from truefi.dataset import TransactionDataset, read_fimi, write_fimi

F = frozenset


@pytest.fixture
def dataset(tmp_path):
    rows = [F({1, 2})] * 6000 + [F({1, 3})] * 3000 + [F({4})] * 1000
    path = tmp_path / "d.dat"
    write_fimi(TransactionDataset(rows), path)
    return path


def test_mine(dataset, capsys):
    assert main(["mine", str(dataset), "--theta", "0.5"]) == 0
    assert capsys.readouterr().out == "1\t0.900000\n2\t0.600000\n1 2\t0.600000\n"


@pytest.mark.parametrize("method", ["1", "2", "bonferroni", "holdout"])
def test_tfi_methods(dataset, tmp_path, method, capsys):
    report = tmp_path / "r.json"
    out = tmp_path / "out.txt"
    code = main(["tfi", str(dataset), "--method", method, "--theta", "0.5",
                 "--report", str(report), "-o", str(out)])
    assert code == 0
    doc = json.loads(report.read_text())
    assert doc["theta"] == 0.5
    lines = out.read_text().splitlines()
    assert lines[0].startswith("1\t")
    assert len(lines) == len(doc["output"]) == 3


def test_tfi_infeasible(dataset, capsys):
    assert main(["tfi", str(dataset), "--method", "2", "--theta", "0.001"]) == 3
    assert "infeasible" in capsys.readouterr().err


def test_tfi_resource_cap(dataset):
    assert main(["tfi", str(dataset), "--method", "2", "--theta", "0.2",
                 "--max-candidates", "1"]) == 4


def test_bad_parameters(dataset, tmp_path):
    assert main(["tfi", str(dataset), "--theta", "0.5", "--delta", "1.5"]) == 2
    assert main(["mine", str(tmp_path / "missing.dat"), "--theta", "0.5"]) == 2
    bad = tmp_path / "bad.dat"
    bad.write_text("1 2\nfoo\n")
    assert main(["mine", str(bad), "--theta", "0.5"]) == 2


def test_argparse_errors_exit_2(dataset):
    with pytest.raises(SystemExit) as err:
        main(["tfi", str(dataset)])
    assert err.value.code == 2


def test_enlarge(dataset, tmp_path):
    out = tmp_path / "big.dat"
    assert main(["enlarge", str(dataset), "--target-n", "250", "--seed", "3", "-o", str(out)]) == 0
    big = read_fimi(out)
    assert big.n == 250
    assert set(big) <= {F({1, 2}), F({1, 3}), F({4})}


def _config(tmp_path, **extra):
    doc = {"planted": {"num_items": 8, "num_planted": 4, "min_len": 1, "max_len": 3, "seed": 1},
           "target_n": 2000, "thetas": [0.3], "trials": 2, "seed": 5}
    doc.update(extra)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(doc))
    return path


def test_evaluate_writes_csv(tmp_path, capsys):
    cfg = _config(tmp_path)
    out = tmp_path / "rows.csv"
    assert main(["evaluate", "--config", str(cfg), "-o", str(out), "--summary"]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("method,theta,trial")
    assert len(lines) == 1 + 4 * 2
    assert "power" in capsys.readouterr().err


def test_evaluate_bad_config(tmp_path):
    cfg = _config(tmp_path, trials=0)
    assert main(["evaluate", "--config", str(cfg)]) == 2
    junk = tmp_path / "junk.json"
    junk.write_text("{not json")
    assert main(["evaluate", "--config", str(junk)]) == 2


def test_module_entry_point(dataset):
    res = subprocess.run([sys.executable, "-m", "truefi", "mine", str(dataset), "--theta", "0.95"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout == ""
    res = subprocess.run([sys.executable, "-m", "truefi", "tfi", str(dataset), "--theta", "0.0001"],
                         capture_output=True, text=True)
    assert res.returncode == 3
