import json

import pytest

from lossft.circuit import circuit_from_text
from lossft.cli import main, read_config_file, ConfigError


def test_counts_json(capsysbinary):
    assert main(["counts"]) == 0
    d = json.loads(capsysbinary.readouterr().out)
    assert d["knill"]["post_zero_ancilla"] == 7 and d["shor"]["post_zero_ancilla"] is None


def test_counts_markdown(capsys):
    assert main(["counts", "--format", "markdown"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0].startswith("| protocol") and "| shor | 0 | 7 | - | 90 |" in out


def test_locations_cat(capsys):
    assert main(["locations", "--circuit", "cat", "--faults", "loss", "--loss-set", "paper5"]) == 0
    rows = capsys.readouterr().out.splitlines()
    assert len(rows) == 30
    assert all(len(r.split("\t")) == 5 for r in rows)


def test_locations_empty_file(tmp_path, capsys):
    f = tmp_path / "empty.txt"
    f.write_text("qubits 3\n")
    assert main(["locations", "--circuit-file", str(f)]) == 0
    out = capsys.readouterr()
    assert out.out == "" and "0 fault specs" in out.err


def test_build_round_trips(capsys):
    assert main(["build", "--protocol", "knill", "--lru", "at07"]) == 0
    c = circuit_from_text(capsys.readouterr().out)
    assert c.count("lru") == 28


def test_equiv_corpus(capsys):
    assert main(["equiv", "--count", "5", "--seed", "3"]) == 0
    assert "5/5 circuits equivalent" in capsys.readouterr().out


def test_equiv_forced_single(capsys):
    assert main(["equiv", "--forced-single"]) == 2
    assert "NOT equivalent" in capsys.readouterr().out


def test_equiv_empty_corpus_warns(capsys):
    assert main(["equiv", "--count", "0"]) == 0
    assert "empty corpus" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    ["check", "--protocol", "bacon"],
    ["check", "--lru", "sometimes"],
    ["check", "--protocol", "shor", "--lru", "post-zero"],
    ["check", "--faults", "leakage"],
    ["check", "--format", "xml"],
    ["equiv", "--qubits", "40"],
    ["frobnicate"],
])
def test_config_errors_exit_one(argv, capsys):
    with pytest.raises(SystemExit) as e:
        rc = main(argv)
        raise SystemExit(rc)
    assert e.value.code == 1


def test_config_file_overrides_flags(tmp_path, capsys):
    f = tmp_path / "run.cfg"
    f.write_text("# knill instead\nprotocol = knill\nlru = post-zero\n")
    assert main(["build", "--protocol", "steane", "--config", str(f)]) == 0
    assert circuit_from_text(capsys.readouterr().out).count("lru") == 7


def test_bad_config_file(tmp_path):
    f = tmp_path / "bad.cfg"
    f.write_text("colour = blue\n")
    with pytest.raises(ConfigError):
        read_config_file(f)
    assert main(["counts", "--config", str(f)]) == 1
    assert main(["counts", "--config", str(tmp_path / "missing.cfg")]) == 1


def test_jobs_from_environment(monkeypatch, tmp_path):
    monkeypatch.setenv("LOSSFT_JOBS", "zero")
    assert main(["counts"]) == 1


def test_check_writes_report(tmp_path, capsys):
    out = tmp_path / "r.json"
    rc = main(["check", "--protocol", "steane", "--faults", "pauli", "--pauli-set", "depolarizing", "-o", str(out)])
    d = json.loads(out.read_text())
    assert rc == 0 and d["totals"]["violations"] == 0 and d["wall_time"] is None
    assert "0 violations" in capsys.readouterr().err
