import io
import json

import pytest

from pdaexpl import cli
from pdaexpl.automata import dfa_to_dict, loads_pda, pda_to_dict
from pdaexpl.constructions import block_region_dfa, demo_turing_machine, multiple_dpda, union_pda
from pdaexpl.game import Ply, Transcript
from pdaexpl.turing import save_tm


def test_member_accept_and_reject(write_pda, capsys):
    path = write_pda(multiple_dpda(1))
    assert cli.main(["member", path, "ab"]) == cli.EXIT_OK
    assert capsys.readouterr().out.strip() == "accept"
    assert cli.main(["member", path, "abb", "--verbose"]) == cli.EXIT_NO
    assert capsys.readouterr().out.strip() == "reject"


def test_member_empty_word(write_pda, capsys):
    path = write_pda(multiple_dpda(2))
    assert cli.main(["member", path]) == cli.EXIT_OK
    assert capsys.readouterr().out.strip() == "accept"


def test_malformed_document(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{\n  "states": [\n    oops\n', encoding="utf-8")
    assert cli.main(["member", str(path), "a"]) == cli.EXIT_USAGE
    assert "error:" in capsys.readouterr().err


def test_missing_file(tmp_path, capsys):
    assert cli.main(["validate", str(tmp_path / "absent.json")]) == cli.EXIT_USAGE
    assert "error:" in capsys.readouterr().err


def test_usage_errors(capsys):
    assert cli.main([]) == cli.EXIT_USAGE
    assert cli.main(["game", "x.json", "--tokens", "0"]) == cli.EXIT_USAGE
    assert cli.main(["construct", "nope", "--param", "1"]) == cli.EXIT_USAGE
    assert "unknown family" in capsys.readouterr().err


def test_construct_to_stdout(capsys):
    assert cli.main(["construct", "union", "--k", "1"]) == cli.EXIT_OK
    pda = loads_pda(capsys.readouterr().out)
    assert pda.states == union_pda(1).states


def test_construct_to_file(tmp_path, capsys):
    out = tmp_path / "suffix.json"
    assert cli.main(["construct", "suffix_one", "--n", "8", "--out", str(out)]) == cli.EXIT_OK
    assert "suffix_one:" in capsys.readouterr().out
    assert cli.main(["member", str(out), "1" + "0" * 7]) == cli.EXIT_OK
    assert cli.main(["member", str(out), "0" * 8]) == cli.EXIT_NO


def test_construct_needs_parameter(capsys):
    assert cli.main(["construct", "multiple"]) == cli.EXIT_USAGE
    assert "needs a parameter" in capsys.readouterr().err


def test_validate(write_pda, capsys):
    assert cli.main(["validate", write_pda(multiple_dpda(1))]) == cli.EXIT_OK
    out = capsys.readouterr().out
    assert "deterministic: yes" in out
    assert cli.main(["validate", write_pda(union_pda(1))]) == cli.EXIT_OK
    assert "deterministic: no" in capsys.readouterr().out


def test_validate_lists_violations(tmp_path, capsys):
    data = pda_to_dict(multiple_dpda(1))
    data["transitions"].append({"from": "q0", "input": "b", "pop": "Z", "to": "ghost", "push": ["Z", "Z", "Z"]})
    path = tmp_path / "broken.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    assert cli.main(["validate", str(path)]) == cli.EXIT_NO
    captured = capsys.readouterr()
    assert "push length" in captured.out
    assert "target state is not declared" in captured.out
    assert captured.err == ""
    assert cli.main(["member", str(path), "ab"]) == cli.EXIT_USAGE


def test_runs_and_grammar(write_pda, capsys):
    path = write_pda(multiple_dpda(1))
    assert cli.main(["runs", path, "ab"]) == cli.EXIT_OK
    out = capsys.readouterr().out
    assert "run(s) on ab" in out
    assert cli.main(["grammar", path]) == cli.EXIT_OK
    assert " -> " in capsys.readouterr().out


def test_game_verdicts(write_pda, capsys):
    path = write_pda(union_pda(1))
    assert cli.main(["game", path, "--tokens", "2", "--horizon", "4"]) == cli.EXIT_OK
    assert "determiner wins" in capsys.readouterr().out
    assert cli.main(["game", path, "--tokens", "1", "--horizon", "3"]) == cli.EXIT_NO
    assert "spoiler wins" in capsys.readouterr().out
    assert cli.main(["game", path, "--tokens-fn", "linear", "--horizon", "3", "--jobs", "2"]) == cli.EXIT_OK


def test_game_writes_strategy(write_pda, tmp_path):
    out = tmp_path / "strategy.json"
    path = write_pda(union_pda(1))
    assert cli.main(["game", path, "--tokens", "2", "--horizon", "3", "--strategy-out", str(out)]) == cli.EXIT_OK
    table = json.loads(out.read_text(encoding="utf-8"))
    assert table["k"] == 2
    assert table["entries"]


def test_game_replay(write_pda, even_b_pda, tmp_path, capsys):
    path = write_pda(even_b_pda)
    good = Transcript(1, "spoiler", "ab", [Ply("a", (even_b_pda.initial_configuration(),)), Ply("b", (None,))])
    bad = Transcript(1, "spoiler", "bb", [Ply("b", (None,)), Ply("b", (None,))])
    for name, transcript, code in (("good.json", good, cli.EXIT_OK), ("bad.json", bad, cli.EXIT_NO)):
        file = tmp_path / name
        file.write_text(json.dumps(transcript.to_dict()), encoding="utf-8")
        assert cli.main(["game", path, "--replay", str(file)]) == code
    assert "loses at bb" in capsys.readouterr().out


def test_game_interactive(write_pda, even_b_pda, tmp_path, monkeypatch):
    path = write_pda(even_b_pda)
    out = tmp_path / "transcript.json"
    monkeypatch.setattr("sys.stdin", io.StringIO("a\nb\n"))
    code = cli.main(["game", path, "--tokens", "1", "--horizon", "2", "--interactive", "spoiler", "--transcript-out", str(out)])
    assert code == cli.EXIT_OK
    saved = json.loads(out.read_text(encoding="utf-8"))
    assert saved["result"] == "determiner"
    assert [p["letter"] for p in saved["plies"]] == ["a", "b"]


@pytest.mark.slow
def test_game_with_turing_oracle(tmp_path, capsys):
    tm_path = str(tmp_path / "tm.json")
    assert save_tm(tm_path, demo_turing_machine())
    pda_path = str(tmp_path / "invalc.json")
    assert cli.main(["construct", "invalc", "--tm", tm_path, "--out", pda_path]) == cli.EXIT_OK
    code = cli.main(["game", pda_path, "--tokens", "2", "--horizon", "4", "--oracle-tm", tm_path])
    assert code == cli.EXIT_OK
    assert "determiner wins" in capsys.readouterr().out


def test_export_dot(write_pda, even_b_pda, tmp_path, capsys):
    path = write_pda(even_b_pda)
    assert cli.main(["export-dot", path]) == cli.EXIT_OK
    assert capsys.readouterr().out.startswith("digraph")
    out = tmp_path / "graph.dot"
    assert cli.main(["export-dot", path, "--out", str(out)]) == cli.EXIT_OK
    assert "doublecircle" in out.read_text(encoding="utf-8")


def test_experiment_to_stdout(tmp_path, capsys):
    config = tmp_path / "sweep.json"
    config.write_text(json.dumps({"family": "multiple", "params": [1, 2]}), encoding="utf-8")
    assert cli.main(["experiment", str(config)]) == cli.EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("family,param,states")
    assert len(lines) == 3



def test_construct_with_dfa(tmp_path, capsys):
    dfa_path = tmp_path / "region.json"
    dfa_path.write_text(json.dumps(dfa_to_dict(block_region_dfa(1))), encoding="utf-8")
    out = str(tmp_path / "block1.json")
    assert cli.main(["construct", "block", "--dfa", str(dfa_path), "--out", out]) == cli.EXIT_OK
    capsys.readouterr()
    assert cli.main(["member", out, "aa#a#b"]) == cli.EXIT_OK
    assert cli.main(["member", out, "a#a#a#b"]) == cli.EXIT_NO
    assert cli.main(["construct", "union", "--k", "1", "--dfa", str(dfa_path)]) == cli.EXIT_USAGE
    assert "alphabets differ" in capsys.readouterr().err


def test_config_show_and_set(isolated_home, capsys):
    assert cli.main(["config"]) == cli.EXIT_OK
    out = capsys.readouterr().out
    assert "eps_budget = 64" in out
    assert cli.main(["config", "--set", "eps_budget=16", "--set", "strict_checkpoint=yes"]) == cli.EXIT_OK
    out = capsys.readouterr().out
    assert "eps_budget = 16" in out
    assert "strict_checkpoint = True" in out
    stored = json.loads((isolated_home / "settings.json").read_text(encoding="utf-8"))
    assert stored["eps_budget"] == 16
    assert cli.main(["config", "--set", "jobs"]) == cli.EXIT_USAGE
    assert cli.main(["config", "--set", "jobs=-2"]) == cli.EXIT_USAGE
    assert "invalid value" in capsys.readouterr().err
