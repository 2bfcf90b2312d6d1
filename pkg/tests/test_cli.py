import io
import json
import subprocess
import sys

import pytest

from kzero.cli import CommandResult, main, run


def invoke(*argv):
    buf = io.StringIO()
    result, code = run(list(argv), stdout=buf)
    return result, code, buf.getvalue()


# -- output contract ----------------------------------------------------------------


def test_unit_tsv_golden(tmp_path):
    result, code, out = invoke("unit", "--D", "2", "--cache", str(tmp_path / "c.tsv"))
    assert code == 0
    assert out == (
        "# kzero unit v1\n"
        "# D=2\n"
        "D\tepsilon\tnorm\tstable\n"
        "2\t1 + sqrt(2)\t-1\ttrue\n"
        "# status pass\n"
    )
    assert result.status == "pass"
    assert result.payload["epsilon"] == "1 + sqrt(2)"


def test_contfrac_tsv_golden(tmp_path):
    _, code, out = invoke("contfrac", "--D", "7", "--cache", str(tmp_path / "c.tsv"))
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "# kzero contfrac v1"
    assert lines[2] == "D\tpreperiod\tperiod"
    assert lines[3] == "7\t2\t1,1,1,4"
    assert lines[-1] == "# status pass"


def test_json_format(tmp_path):
    result, code, out = invoke(
        "dimgroup", "--D", "5", "--format", "json", "--cache", str(tmp_path / "c.tsv")
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["command"] == "dimgroup"
    assert doc["status"] == "pass"
    assert doc["payload"]["matrix"] == [[1, 1], [1, 0]]
    assert doc["payload"]["lambda"] == "1/2 + 1/2*sqrt(5)"
    assert isinstance(result, CommandResult)
    # canonical key order makes JSON output reproducible
    assert out == json.dumps(doc, sort_keys=True) + "\n"


def test_omega_and_sl2(tmp_path):
    _, code, out = invoke("omega", "--D", "13", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["payload"]["omega"] == "1/2 + 1/2*sqrt(13)"
    assert doc["payload"]["trace"] == "1"
    assert doc["payload"]["norm"] == "-3"

    _, code, out = invoke("sl2", "--p", "5", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["payload"]["order"] == 120
    assert sorted(doc["payload"]["degrees"]) == [1, 2, 2, 3, 3, 4, 4, 5, 6]


def test_dimgroup_uhf(tmp_path):
    _, code, out = invoke("dimgroup", "--uhf-p", "3", "--depth", "4", "--format", "json")
    assert code == 0
    assert json.loads(out)["payload"]["sizes"] == [1, 3, 9, 27, 81]


def test_tower_and_coherence(tmp_path):
    _, code, out = invoke("tower", "--p", "3", "--depth", "4", "--window", "2")
    assert code == 0
    assert "# status pass" in out

    _, code, out = invoke("coherence", "--D", "3", "--format", "json",
                          "--cache", str(tmp_path / "c.tsv"))
    assert code == 0
    doc = json.loads(out)
    assert doc["payload"] == {
        "D": 3,
        "effros_shen": True,
        "unit_stable": True,
        "g_coherence": True,
    }

    # D outside the curve table: the g-coherence column is not applicable
    _, code, out = invoke("coherence", "--D", "7", "--format", "json")
    assert code == 0
    assert json.loads(out)["payload"]["g_coherence"] is None


def test_count_ap_zeta_local(tmp_path):
    cache = str(tmp_path / "c.tsv")
    _, code, out = invoke("count", "--D", "1", "--p", "5", "--cache", cache)
    assert code == 0 and "5\t1\t8" in out.replace("-1\t0\t", "")

    _, code, out = invoke("count", "--a4", "-1", "--a6", "0", "--p", "5", "--r", "2",
                          "--cache", cache, "--format", "json")
    assert code == 0
    assert json.loads(out)["payload"]["count"] == 32

    _, code, out = invoke("ap", "--D", "1", "--p", "13", "--cache", cache, "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["payload"]["ap"] == 6 and doc["payload"]["match"] is True

    _, code, out = invoke("zeta-local", "--D", "1", "--p", "5", "--cache", cache)
    assert code == 0
    assert "(1+2t+5t^2)/((1-t)(1-5t))" in out


def test_lfun_and_match(tmp_path):
    cache = str(tmp_path / "c.tsv")
    _, code, out = invoke("lfun", "--which", "zeta", "--s", "2", "--bound", "100",
                          "--format", "json", "--cache", cache)
    assert code == 0
    val = json.loads(out)["payload"]["value_re"]
    assert abs(val - 1.6449) < 1e-2  # truncated at 100: tail is about 3e-3

    result, code, out = invoke("match", "--D", "3", "--bound", "60", "--cache", cache)
    assert code == 0
    assert result.payload["mismatches"] == []
    lines = [l for l in out.splitlines() if not l.startswith("#")]
    assert lines[0] == "p\tap_motivic\tap_automorphic\tmatch"
    assert lines[1] == "5\t0\t0\ttrue"

    _, code, out = invoke("prop3", "--D", "1", "--s", "3", "--bound", "100",
                          "--cache", cache, "--format", "json")
    assert code == 0
    assert json.loads(out)["payload"]["residual"] < 1e-10


def test_adelic_records(tmp_path):
    _, code, out = invoke("adelic", "--ramified", "2,3", "--bound", "7", "--D", "5")
    assert code == 0
    body = [l for l in out.splitlines() if not l.startswith("#")]
    assert body == [
        "ramified\t2,3",
        "factor\t5\tlevels\t1,5,25",
        "factor\t7\tlevels\t1,7,49",
        "infinite\tseed\t1,1\tmatrix\t1,1;1,0\tperiod\t1",
    ]


# -- exit codes ----------------------------------------------------------------------


def test_domain_error_exits_2(tmp_path):
    result, code, out = invoke("omega", "--D", "4", "--format", "json")
    assert code == 2
    assert result.status == "error"
    assert "message" in json.loads(out)["payload"]


def test_failed_check_exits_1(tmp_path):
    # tolerance zero cannot be met: the command runs but the check fails
    result, code, out = invoke(
        "prop3", "--D", "1", "--s", "3", "--bound", "30",
        "--tol", "0", "--cache", str(tmp_path / "c.tsv"),
    )
    assert code == 1
    assert result.status == "fail"
    assert out.strip().endswith("# status fail")


def test_usage_error_exits_2():
    with pytest.raises(SystemExit) as exc:
        run(["lfun", "--which", "nonsense", "--s", "2", "--bound", "10"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit):
        run([])


def test_main_returns_exit_code(tmp_path, capsys):
    assert main(["omega", "--D", "5"]) == 0
    capsys.readouterr()


# -- cache handling ------------------------------------------------------------------


def test_cache_flag_creates_file(tmp_path):
    path = tmp_path / "mine.tsv"
    invoke("ap", "--D", "1", "--p", "5", "--cache", str(path))
    assert path.read_text().startswith("a4\ta6\tp\tap\n")
    assert "-1\t0\t5\t-2" in path.read_text()


def test_cache_env_var_and_flag_precedence(tmp_path, monkeypatch):
    env_path = tmp_path / "env.tsv"
    flag_path = tmp_path / "flag.tsv"
    monkeypatch.setenv("KZERO_AP_CACHE", str(env_path))

    invoke("ap", "--D", "1", "--p", "5")
    assert env_path.exists()

    invoke("ap", "--D", "1", "--p", "13", "--cache", str(flag_path))
    assert "13" in flag_path.read_text()
    assert "13" not in env_path.read_text()


def test_commands_without_counting_do_not_touch_cache(tmp_path, monkeypatch):
    path = tmp_path / "untouched.tsv"
    monkeypatch.setenv("KZERO_AP_CACHE", str(path))
    invoke("contfrac", "--D", "7")
    invoke("sl2", "--p", "7")
    invoke("tower", "--p", "2", "--depth", "3", "--window", "1")
    assert not path.exists()


def test_warm_cache_rerun_is_byte_identical(tmp_path):
    cache = str(tmp_path / "c.tsv")
    args = ("match", "--D", "1", "--bound", "80", "--cache", cache)
    _, _, cold = invoke(*args)
    _, _, warm = invoke(*args)
    assert cold == warm
    args_json = args + ("--format", "json")
    _, _, cold_json = invoke(*args_json)
    _, _, warm_json = invoke(*args_json)
    assert cold_json == warm_json


# -- console entry -------------------------------------------------------------------


def test_module_execution(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "kzero", "unit", "--D", "5"],
        capture_output=True,
        text=True,
        cwd=str(tmp_path),
    )
    assert proc.returncode == 0
    assert "1/2 + 1/2*sqrt(5)" in proc.stdout
    assert proc.stderr == ""
