import csv
import json

import pytest

from qasep.cli import dumps, main

OPEN = ["--L", "2", "--q", "0.5", "--rates", "0.6,0.7,0.2,0.1"]


def run(capsys, argv):
    status = main(argv)
    out = capsys.readouterr()
    return status, out.out, out.err


def test_verify_all_passes(capsys):
    status, out, _ = run(capsys, ["verify", "--all", *OPEN, "--mu", "0.3"])
    doc = json.loads(out)
    assert status == 0
    assert doc["passed"] and not doc["failed"]
    identities = {k: v for k, v in doc["residuals"].items() if not k.startswith("mu_zero")}
    assert max(identities.values()) < 1e-7


def test_verify_exchange_equal_arguments(capsys):
    status, out, _ = run(capsys, ["verify", "--check", "exchange", "--x", "0.2", "--y", "0.2", *OPEN])
    doc = json.loads(out)
    assert status == 0
    assert doc["residuals"]["exchange_UT"] == 0


def test_verify_periodic(capsys):
    status, out, _ = run(capsys, ["verify", "--check", "commutation", "--check", "decomposition",
                                  "--geometry", "periodic", "--L", "3", "--sector", "1"])
    assert status == 0
    assert set(json.loads(out)["residuals"]) >= {"commutation", "decomposition_k3"}


def test_failing_tolerance_gives_status_one(capsys):
    status, out, _ = run(capsys, ["verify", "--check", "commutation", *OPEN, "--tol", "0"])
    assert status == 1
    assert json.loads(out)["failed"] == ["commutation"]


@pytest.mark.parametrize("argv", [
    ["verify", "--all", "--rates", "0,0"],
    ["verify", "--all", "--L", "2"],
    ["verify", "--check", "truncation", "--geometry", "periodic", "--L", "3", "--sector", "1"],
    ["cumulants", "--L", "2", "--q", "0.3", "--rates", "0.2,0.7"],
])
def test_domain_errors_give_status_two(capsys, argv):
    status, _, err = run(capsys, argv)
    assert status == 2
    assert "error" in err


def test_usage_error_gives_status_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--check", "nonsense"])
    assert exc.value.code == 2


def test_cumulants_single_site(capsys):
    status, out, _ = run(capsys, ["cumulants", "--L", "1", "--tasep", "--alpha", "1", "--beta", "1",
                                  "--orders", "3"])
    doc = json.loads(out)
    assert status == 0
    assert doc["cumulants"]["bethe"] == pytest.approx([0.5, 0.25, 0.125], abs=1e-12)
    assert max(doc["cumulants"]["rel_diff"]) < 1e-9
    assert doc["input"]["q"] == 0


def test_cumulants_both_columns(capsys):
    status, out, _ = run(capsys, ["cumulants", "--L", "3", "--q", "0.3", "--rates", "0.6,0.7,0.2,0.1"])
    table = json.loads(out)["cumulants"]
    assert status == 0
    assert len(table["bethe"]) == len(table["oracle"]) == 3
    assert max(table["rel_diff"]) < 1e-6


def test_cumulants_zero_orders(capsys):
    status, out, _ = run(capsys, ["cumulants", *OPEN, "--orders", "0"])
    assert status == 0
    assert json.loads(out)["cumulants"] == {"bethe": [], "oracle": [], "rel_diff": []}


def test_steady_files(tmp_path, capsys):
    status, _, _ = run(capsys, ["steady", "--L", "3", "--q", "0.3", "--rates", "0.6,0.7,0.2,0.1",
                                "--out", str(tmp_path)])
    assert status == 0
    rows = list(csv.reader((tmp_path / "steady.csv").open()))
    assert rows[0] == ["config", "weight", "probability"]
    assert len(rows) == 1 + 2 ** 3
    assert sum(float(r[2]) for r in rows[1:]) == pytest.approx(1.0)
    doc = json.loads((tmp_path / "steady.json").read_text())
    assert doc["schema_version"] == 1 and doc["input"]["L"] == 3


def test_environment_output_directory(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("QASEP_OUT_DIR", str(tmp_path / "env"))
    run(capsys, ["cumulants", *OPEN, "--orders", "1", "--no-oracle"])
    doc = json.loads((tmp_path / "env" / "cumulants.json").read_text())
    assert doc["cumulants"]["bethe"][0] > 0


@pytest.mark.parametrize("command", [["steady"], ["export", "--orders", "2"]])
def test_reruns_are_byte_identical(tmp_path, capsys, command):
    outputs = []
    for _ in range(2):
        run(capsys, [*command, *OPEN, "--out", str(tmp_path)])
        outputs.append({p.name: p.read_bytes() for p in tmp_path.iterdir()})
    assert outputs[0] == outputs[1]


def test_export_grid(tmp_path, capsys):
    run(capsys, ["export", *OPEN, "--orders", "2", "--out", str(tmp_path)])
    rows = list(csv.reader((tmp_path / "export_W.csv").open()))
    assert rows[0][:3] == ["j", "z_re", "z_im"]
    assert len(rows) - 1 == json.loads((tmp_path / "export.json").read_text())["grid"]


def test_dumps_round_trip():
    doc = {"x": 0.1, "y": [1 / 3, 2.5e-300], "z": 1 + 2j}
    back = json.loads(dumps(doc))
    assert back["x"] == 0.1 and back["y"] == [1 / 3, 2.5e-300]
    assert back["z"] == [1.0, 2.0]
    assert "0.10000000000000001" in dumps(doc)
