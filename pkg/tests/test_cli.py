import csv
import io
import json
import subprocess
import sys

import jsonschema
import pytest

from extractorlab.cli import main
from extractorlab.reports import REPORT_SCHEMAS, build_document, envelope_schema, validate_document


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_extract(capsys):
    assert run(capsys, "extract", "--p", "7", "--n", "2", "--x", "1,2", "--y", "3,4")[:2] == (0, "1\n")
    assert run(capsys, "extract", "--p", "7", "--n", "2", "--x", "0,0", "--y", "3,4")[:2] == (0, "1\n")
    code, out, err = run(capsys, "extract", "--p", "7", "--n", "2", "--x", "1,2", "--y", "3,4", "--verbose")
    assert out.splitlines() == ["1", "f = 3", "sigma = 3/7"]


def test_extract_inadmissible_warns(capsys):
    code, out, err = run(capsys, "extract", "--p", "13", "--n", "2", "--x", "1,5", "--y", "2,10")
    assert code == 0 and out == "1\n"
    assert "warning: -1 is a square mod 13" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["extract", "--p", "9", "--n", "2", "--x", "1,2", "--y", "3,4"],
        ["extract", "--p", "7", "--n", "2", "--x", "1,2,3", "--y", "3,4"],
        ["rate", "--n", "3", "--d", "2", "--alpha", "7/2"],
        ["rate", "--n", "3", "--d", "2", "--alpha", "abc"],
        ["bias", "--p", "7", "--source", "line"],
    ],
)
def test_bad_input_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["extract", "--p", "x"])
    assert exc.value.code == 2


def test_cap_exit_3(capsys):
    code, _, err = run(capsys, "bias", "--p", "7", "--cap-pairs", "100")
    assert code == 3 and "pair cap" in err


def test_rate(capsys):
    assert run(capsys, "rate", "--n", "3", "--d", "2", "--alpha", "17/7")[1] == "21/44\n"
    assert run(capsys, "rate", "--n", "4", "--d", "3", "--alpha", "5/2")[1] == "4/9\n"
    assert run(capsys, "rate", "--n", "3", "--d", "2", "--alpha", "99/41")[1] == "123/260\n"
    code, out, _ = run(capsys, "rate", "--n", "4", "--d", "3", "--alpha", "5/2", "--format", "json")
    doc = json.loads(out)
    validate_document(doc)
    assert doc["reports"][0]["alternative_value"] == "8/3"


def test_fourier(capsys):
    code, out, _ = run(capsys, "fourier", "--p", "101")
    assert code == 0 and out.startswith("p=101 coefficient_sum=3.9006")
    code, out, _ = run(capsys, "fourier", "--p", "101,211", "--format", "json")
    doc = json.loads(out)
    assert [r["p"] for r in doc["reports"]] == [101, 211]


def test_checklemma(capsys):
    code, out, _ = run(capsys, "checklemma", "--trials", "50", "--p", "11", "--nmax", "2", "--seed", "1")
    assert code == 0
    assert len(out.splitlines()) == 4 and all("violations=0" in line for line in out.splitlines())


def test_checklemma_reports_violation(capsys, monkeypatch):
    import extractorlab.analysis as an

    monkeypatch.setattr(an.ExpSumReport, "holds", property(lambda self: False))
    code, _, _ = run(capsys, "checklemma", "--trials", "2", "--p", "7", "--nmax", "1")
    assert code == 1


def test_bias_sweep_csv(capsys):
    code, out, _ = run(capsys, "bias", "--p", "7,11,19,23", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == ["p", "n", "|A|", "|B|", "metric", "value", "seed", "millis"]
    sd = [float(r["value"]) for r in rows if r["metric"] == "sd"]
    assert len(sd) == 4 and all(a > b for a, b in zip(sd, sd[1:]))
    assert "\r" not in out


def test_bias_line_and_point(capsys):
    code, out, _ = run(capsys, "bias", "--p", "13", "--source", "line")
    doc = json.loads(out)
    assert code == 0 and doc["reports"][0]["sd_exact"] == "1/2" and doc["reports"][0]["sd"] == 0.5
    code, out, _ = run(capsys, "bias", "--p", "11", "--source", "point")
    assert json.loads(out)["reports"][0]["sd"] == 0.5


def test_bias_with_fixtures(capsys, tmp_path):
    fx = tmp_path / "x.json"
    fy = tmp_path / "y.json"
    assert run(capsys, "fixture", "--p", "11", "--kind", "random-general", "--size", "20", "--seed", "4", "--out", str(fx))[0] == 0
    assert run(capsys, "fixture", "--p", "11", "--kind", "line", "--n", "3", "--out", str(tmp_path / "l.json"))[0] == 0
    assert run(capsys, "fixture", "--p", "11", "--kind", "random-flat", "--size", "30", "--seed", "5", "--out", str(fy))[0] == 0
    code, out, _ = run(capsys, "bias", "--fixture", str(fx), "--fixture", str(fy))
    doc = json.loads(out)
    rep = doc["reports"][0]
    assert code == 0 and rep["size_x"] == 20 and rep["size_y"] == 30 and rep["chain_holds"]


def test_energy(capsys):
    code, out, _ = run(capsys, "energy", "--p", "7", "--n", "3", "--size", "30", "--seed", "2")
    doc = json.loads(out)
    assert code == 0
    assert [r["method"] for r in doc["reports"]] == ["brute", "spectral"]
    assert doc["reports"][0]["energy"] == doc["reports"][1]["energy"]


def test_scan_outputs(capsys, tmp_path):
    code, out, _ = run(capsys, "scan", "--p", "5", "--d", "4", "--trials", "3", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 3
    assert list(rows[0]) == ["p", "d", "family", "size", "trial", "energy", "fitted_exponent", "seed"]
    assert rows[0]["size"] == "9"  # round(5^(4/3))
    out_path = tmp_path / "scan.json"
    assert run(capsys, "scan", "--p", "7", "--d", "3", "--sizes", "1,10", "--trials", "2", "--out", str(out_path))[0] == 0
    doc = json.loads(out_path.read_text())
    validate_document(doc)
    assert doc["reports"][0]["fitted_exponent"] is None


def test_scan_inadmissible(capsys):
    assert run(capsys, "scan", "--p", "13", "--d", "3", "--sizes", "10")[0] == 2
    assert run(capsys, "scan", "--p", "13", "--d", "3", "--sizes", "10", "--allow-inadmissible")[0] == 0


def test_seed_env_default(capsys, monkeypatch):
    monkeypatch.setenv("EXTRACTORLAB_SEED", "77")
    _, out, _ = run(capsys, "scan", "--p", "5", "--d", "4", "--trials", "1")
    assert json.loads(out)["seed"] == 77
    monkeypatch.setenv("EXTRACTORLAB_SEED", "nope")
    assert run(capsys, "scan", "--p", "5", "--d", "4", "--trials", "1")[0] == 2


def test_envelope_schema_rejects_bad_reports():
    doc = build_document("fourier", [{"p": 3, "coefficient_sum": 1.0, "log_p": 1.0, "ratio": 1.0}], {}, None)
    doc["reports"][0]["extra"] = 1
    with pytest.raises(jsonschema.ValidationError):
        validate_document(doc)
    assert set(REPORT_SCHEMAS) == {"bias", "expsum", "energy", "scan", "rate", "fourier", "checklemma"}
    jsonschema.Draft202012Validator.check_schema(envelope_schema("bias"))


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "extractorlab", "rate", "--n", "3", "--d", "2", "--alpha", "2"],
        capture_output=True,
        text=True,
    )
    assert res.returncode == 0 and res.stdout == "3/8\n"
