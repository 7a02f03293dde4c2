import json
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from halfpoincare import io as hio
from halfpoincare.cli import ConfigError, main, parse_complex
from halfpoincare.series import FourierSeries

finite = st.floats(allow_nan=False, allow_infinity=False)


@given(st.lists(st.tuples(finite, finite), min_size=1, max_size=20))
def test_csv_round_trip_exact(pairs):
    fs = FourierSeries(6.5, 1.0, [complex(a, b) for a, b in pairs])
    text = hio.coefficients_to_csv(fs)
    assert text.splitlines()[0] == "n,re,im"
    rows = [line.split(",") for line in text.splitlines()[1:]]
    back = np.array([float(r[1]) + 1j * float(r[2]) for r in rows])
    assert np.array_equal(back, fs.coeffs)


def test_csv_file_round_trip(tmp_path):
    fs = FourierSeries(6.5, 1.0, [1 / 3, -2.5e-300 + 1j, 7.0])
    p = tmp_path / "c.csv"
    hio.write_coefficients_csv(p, fs)
    back = hio.read_coefficients_csv(p, 6.5)
    assert np.array_equal(back.coeffs, fs.coeffs)


@pytest.mark.parametrize("body", ["k,re,im\n1,0,0\n", "n,re,im\n1,0,0\n3,0,0\n", "n,re,im\n"])
def test_csv_rejects(tmp_path, body):
    p = tmp_path / "bad.csv"
    p.write_text(body)
    with pytest.raises(ValueError):
        hio.read_coefficients_csv(p, 6.5)


def test_report_text_deterministic():
    data = {"b": 1.0, "a": [complex(1, 2), float("inf")], "c": np.float64(0.1)}
    t1, t2 = hio.to_report_text(data), hio.to_report_text(dict(reversed(list(data.items()))))
    assert t1 == t2
    parsed = json.loads(t1)
    assert parsed["a"] == [{"re": 1.0, "im": 2.0}, "inf"]


@pytest.mark.parametrize("text, value", [("3", 3), ("3+1i", 3 + 1j), ("0.5-2i", 0.5 - 2j), ("i", 1j),
                                         ("-i", -1j), ("2.6", 2.6), ("1e-3+4j", 1e-3 + 4j)])
def test_parse_complex(text, value):
    assert parse_complex(text) == value


def test_parse_complex_rejects():
    with pytest.raises(ConfigError):
        parse_complex("three")


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_sanity_command(capsys):
    code, out, _ = run(["sanity"], capsys)
    assert code == 0
    assert out.count("PASS") == 64 and "FAIL" not in out


def test_certify_check1_pass(capsys):
    code, out, err = run(["certify", "--level", "4", "--m", "13/2", "--s", "3.0"], capsys)
    rep = json.loads(out)["report"]
    assert rep["checks"][0]["passed"] is True
    assert rep["checks"][0]["rhs"] == pytest.approx(np.pi + 8 / 3)
    assert code == 1 and rep["verdict"] == "inequality-failed"


def test_certify_precondition_failed(capsys):
    code, out, err = run(["certify", "--level", "4", "--m", "11/2", "--s", "2.6"], capsys)
    assert code == 1
    assert json.loads(out)["report"]["verdict"] == "precondition-failed"
    assert "precondition-failed" in err


def test_certify_certified(capsys):
    code, out, _ = run(["certify", "--level", "20", "--m", "13/2", "--s", "2"], capsys)
    assert code == 0
    assert json.loads(out)["report"]["verdict"] == "certified-nonvanishing"


def test_certify_reflected_kind(capsys):
    code, out, _ = run(["certify", "--level", "4", "--m", "13/2", "--s", "3.3", "--kind", "reflected"], capsys)
    assert code == 1
    assert json.loads(out)["report"]["kind"] == "reflected"


def test_report_byte_identical(tmp_path):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        main(["certify", "--level", "20", "--m", "13/2", "--s", "2+0.5i", "--out", str(p)])
    assert paths[0].read_bytes() == paths[1].read_bytes()


def write_config(tmp_path, body):
    p = tmp_path / "run.ini"
    p.write_text(body)
    return str(p)


def test_config_file_used(tmp_path, capsys):
    cfg = write_config(tmp_path, "[group]\nlevel = 20\nweight_numerator = 13\n")
    code, out, _ = run(["certify", "--config", cfg, "--s", "2"], capsys)
    assert code == 0 and json.loads(out)["group"]["level"] == 20


def test_flags_override_config(tmp_path, capsys):
    cfg = write_config(tmp_path, "[group]\nlevel = 20\nweight_numerator = 13\n")
    code, out, _ = run(["certify", "--config", cfg, "--level", "4", "--s", "2"], capsys)
    assert json.loads(out)["group"]["level"] == 4
    assert code == 1


@pytest.mark.parametrize("body", ["[bogus]\nx = 1\n", "[group]\nlevel = four\n", "[group]\ncolour = red\n",
                                  "[group]\nlevel = 6\n", "[numeric]\ntol = -1\n"])
def test_config_errors_exit_2(tmp_path, capsys, body):
    cfg = write_config(tmp_path, body)
    code, _, err = run(["certify", "--config", cfg, "--s", "2"], capsys)
    assert code == 2 and "error" in err


def test_missing_config_exit_2(tmp_path, capsys):
    code, _, _ = run(["sanity", "--config", str(tmp_path / "nope.ini")], capsys)
    assert code == 2


@pytest.mark.parametrize("argv", [["certify", "--m", "13/2"], ["certify", "--m", "3", "--s", "2"],
                                  ["eval", "--z", "1i", "--source", "gauss"], ["frobnicate"],
                                  ["certify", "--level", "4", "--m", "13/2", "--s", "4"],
                                  ["m0", "--eps", "0.4", "--nu", "2", "--eta", "1"]])
def test_bad_invocations_exit_2(capsys, argv):
    code, _, _ = run(argv, capsys)
    assert code == 2


def test_m0_command(capsys):
    code, out, _ = run(["m0", "--eps", "1", "--nu", "2", "--eta", "1"], capsys)
    assert code == 0 and json.loads(out)["m0"] == "22971/2"


def test_m0_trace_csv(capsys):
    code, out, _ = run(["m0", "--eps", "1", "--nu", "2", "--eta", "1", "--format", "csv"], capsys)
    lines = out.splitlines()
    assert lines[0] == "m,R,passed" and len(lines) == 1 + 11482 + 200


def test_eval_command(capsys):
    code, out, _ = run(["eval", "--level", "4", "--m", "13/2", "--z", "0.1+1i", "--c-bound", "100"], capsys)
    data = json.loads(out)
    assert code == 0 and len(data["values"]) == 1
    assert data["values"][0]["tail_estimate"] < 1e-6


def test_eval_threads_auto(capsys):
    a = run(["eval", "--z", "0.2+0.7i", "--c-bound", "80", "--threads", "0", "--format", "csv"], capsys)[1]
    b = run(["eval", "--z", "0.2+0.7i", "--c-bound", "80", "--threads", "1", "--format", "csv"], capsys)[1]
    assert a == b


def test_coeffs_command(tmp_path):
    out = tmp_path / "c.csv"
    code = main(["coeffs", "--n-terms", "4", "--y0", "0.5", "--c-bound", "200", "--format", "csv",
                 "--out", str(out)])
    assert code == 0
    fs = hio.read_coefficients_csv(out, 6.5)
    assert fs.K == 4 and fs.coeffs[0].real == pytest.approx(1.0624, abs=1e-3)


def test_lvalue_command(tmp_path, capsys):
    table = tmp_path / "delta.csv"
    hio.write_coefficients_csv(table, FourierSeries(6.5, 1.0, [0.0, 1.0]))
    code, out, _ = run(["lvalue", "--coeffs", str(table), "--s", "5"], capsys)
    data = json.loads(out)
    assert code == 0
    assert data["dirichlet"]["value"]["re"] == pytest.approx(2 ** -5)
    assert data["unfolded"]["value"]["re"] == pytest.approx(2 ** -5, rel=1e-12)
    code, out, _ = run(["lvalue", "--coeffs", str(table), "--s", "4"], capsys)
    data = json.loads(out)
    assert "unavailable" in data["dirichlet"] and code == 0
    code, _, _ = run(["lvalue", "--coeffs", str(table), "--s", "3"], capsys)
    assert code == 2


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "halfpoincare", "certify", "--level", "4", "--m", "11/2",
                        "--s", "2.6"], capture_output=True, text=True)
    assert r.returncode == 1
    assert json.loads(r.stdout)["report"]["verdict"] == "precondition-failed"
