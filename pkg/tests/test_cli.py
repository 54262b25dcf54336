import json

import pytest

from wigcohen.algebra import WeylOp
from wigcohen.cli import RunConfig, main
from wigcohen.dsl import op


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--no-timestamp")
    return code, json.loads(out), err


def test_transform_tilde_oscillator(capsys):
    code, doc, _ = run_json(capsys, "transform", "--op", "x^2+Dx^2", "--P", "0", "--which", "tilde")
    assert code == 0
    assert op(doc["result"]) == op("(x - Dy/2)^2 + (y + Dx/2)^2")
    assert WeylOp.from_json(doc["terms"]) == op(doc["result"])


def test_transform_examples(capsys):
    _, doc, _ = run_json(capsys, "transform", "--op", "x", "--P", "xi*eta/2", "--which", "tilde")
    assert op(doc["result"]) == op("x - Dy")
    _, doc, _ = run_json(capsys, "transform", "--op", "Dy", "--which", "pushforward")
    assert op(doc["result"]) == op("y - x")
    _, doc, _ = run_json(capsys, "transform", "--op", "x", "--which", "bar", "--q", "xi^2+1")
    assert doc["which"] == "bar"


def test_parse_error_exit_2(capsys):
    code, _, err = run(capsys, "transform", "--op", "x^2 +* y")
    assert code == 2 and "offset" in err and "^" in err


def test_kernel_error_exit_3(capsys):
    code, _, err = run(capsys, "transform", "--op", "x", "--q", "xi^2 - 1")
    assert code == 3 and "vanishes" in err
    code, _, _ = run(capsys, "transform", "--op", "x", "--P", "i*xi")
    assert code == 3


def test_usage_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as ei:
        main(["verify", "--suite", "bogus"])
    assert ei.value.code == 2
    code, _, _ = run(capsys, "verify", "--suite", "wigner", "-N", "100")
    assert code == 2


def test_verify_identity_row_zero(capsys):
    code, doc, _ = run_json(capsys, "verify", "--suite", "cohen", "--P", "0", "--q", "1", "--op", "1",
                            "-N", "64", "-L", "8")
    assert code == 0
    assert all(r["abs_residual"] == 0.0 for r in doc["reports"])
    assert doc["config"]["N"] == 64


def test_verify_coarse_grid_breach(capsys):
    code, doc, err = run_json(capsys, "verify", "--suite", "wigner", "-N", "16")
    assert code == 4 and not doc["passed"]
    assert any(r["warnings"] for r in doc["reports"])
    assert "worst case" in err


def test_verify_exact_backend(capsys):
    code, doc, _ = run_json(capsys, "verify", "--suite", "wigner", "--backend", "exact")
    assert code == 0 and doc["cases"] == 24 and all(r["backend"] == "exact" for r in doc["reports"])


def test_verify_csv_and_out(capsys, tmp_path):
    out = tmp_path / "r.csv"
    code, _, _ = run(capsys, "verify", "--suite", "wigner", "--format", "csv", "--out", str(out),
                     "--no-timestamp")
    lines = out.read_text().splitlines()
    assert code == 0 and lines[0].startswith("name,backend") and len(lines) == 25


def test_weights_commands(capsys):
    code, doc, _ = run_json(capsys, "weights", "classical", "check")
    assert code == 0 and doc["report"]["all_pass"] and doc["report"]["b"] == pytest.approx(1.0)
    code, doc, _ = run_json(capsys, "weights", "gevrey:2", "conjugate", "--s", "1")
    assert doc["table"][0]["abs_error"] < 1e-8
    code, doc, _ = run_json(capsys, "weights", "classical", "conjugate", "--s", "0.5,2")
    assert doc["table"][1]["phi_star"] == "inf"
    code, doc, _ = run_json(capsys, "weights", "gevrey:2", "seminorm", "--u", "gaussian",
                            "--system", "6", "--lambda", "1")
    assert doc["report"]["verdict"] == "stabilized"
    code, _, _ = run(capsys, "weights", "nope", "check")
    assert code == 2


def test_gallery_commands(capsys):
    code, doc, _ = run_json(capsys, "gallery", "twisted", "hypo")
    assert code == 0 and doc["verdict"]["violated"] and doc["verdict"]["witness"]["abs_a"] < 1e-9
    code, doc, _ = run_json(capsys, "gallery", "HO3", "show", "--Q", "Dx^3", "--R", "Dy^2")
    assert op(doc["example"]["form"]) == op("(x - Dy + Dx^3)^2 + (y + Dy^2)^2")
    assert doc["example"]["tilde_check"]
    code, doc, _ = run_json(capsys, "gallery", "twisted", "solve", "-N", "64", "-L", "8")
    assert code == 0 and doc["residual"] <= 1e-2
    code, _, _ = run(capsys, "gallery", "HO1", "solve")
    assert code == 2
    code, _, _ = run(capsys, "gallery", "twisted", "show", "--Q", "Dx")
    assert code == 2


def test_timestamp_toggle(capsys):
    _, out, _ = run(capsys, "transform", "--op", "x")
    assert "timestamp" in json.loads(out)
    _, doc, _ = run_json(capsys, "transform", "--op", "x")
    assert "timestamp" not in doc and doc["config"]["seed"] == 0


def test_run_config_validation():
    from wigcohen.cli import CliError
    with pytest.raises(CliError):
        RunConfig(N=2048)
    with pytest.raises(CliError):
        RunConfig(L=0)
