import csv
import io
import json
import subprocess
import sys


from bachet import __version__
from bachet.anomalous import anomalous_square_certificate, find_anomalous_D, pell_sequence
from bachet.cli import run
from bachet.curves import CurveParams, count_points, order_candidates, trace, twist_spectrum
from bachet.experiments import odc_table
from bachet.korselt import gen_silv_classify, korselt_search, korselt_type1_check


def invoke(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def result_of(capsys, *argv):
    code, out, _ = invoke(capsys, *argv)
    assert code == 0
    env = json.loads(out)
    assert env["artifact_version"] == __version__
    return env


def test_trace(capsys):
    env = result_of(capsys, "trace", "--p", "2971", "--c", "0", "--d", "1")
    assert env["result"]["trace"] == 56 == trace(2971, 0, 1)
    assert env["command"] == "trace"
    assert env["parameters"] == {"p": 2971, "c": 0, "d": 1}


def test_order_twists_candidates(capsys):
    assert result_of(capsys, "order", "--p", "7", "--d", "5")["result"]["order"] == count_points(7, 0, 5)
    tw = result_of(capsys, "twists", "--p", "13")["result"]
    assert tw == json.loads(json.dumps(twist_spectrum(13).as_record()))
    cand = result_of(capsys, "candidates", "--p", "7")["result"]["orders"]
    assert cand == sorted(order_candidates(7))


def test_anomalous_commands(capsys):
    assert result_of(capsys, "anomalous", "find-d", "--p", "7")["result"]["D"] == find_anomalous_D(7)
    assert result_of(capsys, "anomalous", "find-d", "--p", "13")["result"]["D"] is None
    rows = result_of(capsys, "anomalous", "primes", "--bound", "100")["result"]["primes"]
    assert [r["p"] for r in rows] == [7, 19, 37, 61]
    certs = result_of(capsys, "anomalous", "squares", "--count", "3", "--no-oracle")["result"]["certificates"]
    assert certs == [anomalous_square_certificate(p, oracle=False).as_record() for p in (13, 181)]


def test_pell(capsys):
    env = result_of(capsys, "pell", "--count", "3")
    assert [(e["p"], e["n"]) for e in env["result"]["entries"]] == [(1, 0), (13, 7), (181, 104)]
    assert env["result"]["entries"] == [vars(e) for e in pell_sequence(3)]


def test_korselt_check(capsys):
    env = result_of(capsys, "korselt", "check", "--n", "157463", "--c", "0", "--d", "1")
    assert env["command"] == "korselt check"
    assert env["result"]["verdict"] is True
    assert len(env["result"]["per_prime"]) == 2
    assert env["result"] == korselt_type1_check(CurveParams(157463, 0, 1), 157463).as_record()


def test_korselt_search_progress_on_stderr(capsys):
    code, out, err = invoke(capsys, "korselt", "search", "--bound", "200000")
    assert code == 0
    pairs = json.loads(out)["result"]["pairs"]
    assert [53, 2971] in pairs
    assert pairs == [list(x) for x in korselt_search(CurveParams(5, 0, 1), 200000)]
    assert "korselt search: p =" in err and "p =" not in out


def test_classify_and_pseudoprime(capsys):
    labels = result_of(capsys, "classify", "--n", "157463")["result"]["labels"]
    assert labels == sorted(gen_silv_classify(CurveParams(157463, 0, 1), 157463))
    res = result_of(capsys, "pseudoprime", "--n", "157463", "--seed", "3", "--points", "5")["result"]
    assert res["all"] is True and len(res["checks"]) == 5


def test_experiment_odc(capsys):
    env = result_of(capsys, "experiment", "odc", "--N", "64", "--N", "128", "--trials", "50", "--seed", "9")
    expected = odc_table([64, 128], 50, 9).records()
    assert env["result"]["rows"] == expected
    code, out, _ = invoke(capsys, "experiment", "odc", "--N", "64", "--N", "128", "--trials", "50",
                          "--seed", "9", "--format", "csv")
    assert code == 0 and out == odc_table([64, 128], 50, 9).to_csv()


def test_density(capsys):
    res = result_of(capsys, "density", "--d", "5", "--bound", "7")["result"]
    assert res["count"] == 1


def test_csv_and_json_same_record(capsys):
    argv = ("korselt", "check", "--n", "133", "--d", "124")
    env = result_of(capsys, *argv)
    code, out, _ = invoke(capsys, *argv, "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 1
    row = rows[0]
    for k, v in env["result"].items():
        cell = row[k]
        if isinstance(v, (dict, list)):
            assert json.loads(cell) == v
        elif isinstance(v, bool):
            assert cell == str(v)
        elif v is None:
            assert cell == ""
        else:
            assert cell == str(v)


def test_csv_one_row_per_record(capsys):
    code, out, _ = invoke(capsys, "pell", "--count", "4", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [int(r["p"]) for r in rows] == [e.p for e in pell_sequence(4)]


def test_text_format(capsys):
    code, out, _ = invoke(capsys, "trace", "--p", "53", "--format", "text")
    assert code == 0 and "trace" in out and "0" in out


def test_exit_codes(capsys):
    assert invoke(capsys, "frobnicate")[0] == 2
    assert invoke(capsys, "trace")[0] == 2
    assert invoke(capsys, "experiment", "odc", "--weighting", "hurwitz")[0] == 2
    code, _, err = invoke(capsys, "twists", "--p", "11")
    assert code == 1 and "error" in err
    assert invoke(capsys, "trace", "--p", "7", "--d", "0")[0] == 1
    assert invoke(capsys, "experiment", "odc", "--N", "64", "--trials", "0")[0] == 1
    assert invoke(capsys, "anomalous", "squares", "--count", "300")[0] == 1


def test_byte_identical_repeat_runs(capsys):
    argv = ("experiment", "odc", "--N", "64", "--trials", "40", "--weighting", "exact")
    first = invoke(capsys, *argv)[1]
    second = invoke(capsys, *argv)[1]
    assert first == second and first


def test_exact_bound_env_override(capsys, monkeypatch):
    monkeypatch.setenv("BACHET_EXACT_BOUND", "50")
    code, _, err = invoke(capsys, "experiment", "odc", "--N", "64", "--trials", "30", "--weighting", "exact")
    assert code == 1 and "PAIR_UNIFORM" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "bachet", "trace", "--p", "2971"],
                          capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["result"]["trace"] == 56
    proc = subprocess.run([sys.executable, "-m", "bachet", "nope"], capture_output=True, text=True)
    assert proc.returncode == 2
