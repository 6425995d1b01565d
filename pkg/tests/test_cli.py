"""Command-line behavior: outputs, exit codes, diagnostics, determinism."""

import json
import math

import pytest

from sftlearn import Grammar, enumerate_grammars, Lexicon
from sftlearn.cli import main
from sftlearn.serialize import grammar_from_dict, potential_from_dict

PHI = (1 + math.sqrt(5)) / 2


@pytest.fixture
def golden_file(tmp_path):
    path = tmp_path / "golden.json"
    path.write_text(json.dumps({"theta": 2, "matrix": [[1, 1], [1, 0]]}))
    return str(path)


@pytest.fixture
def zero_file(tmp_path):
    path = tmp_path / "zero.json"
    path.write_text(json.dumps({"theta": 2, "range": 2, "entries": []}))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_pressure_subcommand(capsys, golden_file, zero_file):
    code, out, err = run(capsys, "pressure", "--grammar", golden_file,
                         "--potential", zero_file)
    assert code == 0
    assert json.loads(out)["pressure"] == pytest.approx(math.log(PHI), abs=1e-9)
    assert "finished in" in err


def test_entropy_subcommand_defaults_to_zero_potential(capsys, golden_file):
    code, out, _ = run(capsys, "entropy", "--grammar", golden_file)
    assert code == 0
    assert json.loads(out)["entropy"] == pytest.approx(math.log(PHI), abs=1e-9)


def test_sample_subcommand_reports_word_and_chain(capsys, golden_file):
    code, out, _ = run(capsys, "sample", "--grammar", golden_file,
                       "--length", "64", "--seed", "3")
    assert code == 0
    payload = json.loads(out)
    assert payload["length"] == 64 and len(payload["word"]) == 64
    assert payload["seed"] == 3
    assert "11" not in payload["word"]
    assert payload["chain"]["lambda"] == pytest.approx(PHI, abs=1e-9)


def test_identify_auto_matches_the_hand_example(capsys, zero_file):
    code, out, _ = run(capsys, "identify", "--sample", "0110",
                       "--potential", zero_file)
    assert code == 0
    result = json.loads(out)
    assert result["n"] == 4
    winners = [result["scores"][i]["grammar"]["matrix"] for i in result["ml_set"]]
    assert winners == [[[0, 1], [1, 1]]]
    by_matrix = {tuple(map(tuple, s["grammar"]["matrix"])): s for s in result["scores"]}
    assert by_matrix[((1, 1), (1, 0))]["log_likelihood"] == "-inf"
    assert by_matrix[((1, 1), (1, 0))]["entropy"] is None
    assert by_matrix[((1, 1), (1, 1))]["log_likelihood"] == pytest.approx(
        math.log(0.0625), abs=1e-9)


def test_identify_accepts_word_files_and_explicit_sets(capsys, tmp_path, zero_file):
    word_file = tmp_path / "word.json"
    word_file.write_text("[0, 1, 1, 0]")
    set_file = tmp_path / "set.json"
    set_file.write_text(json.dumps([{"theta": 2, "matrix": [[1, 1], [1, 1]]}]))
    code, out, _ = run(capsys, "identify", "--sample-file", str(word_file),
                       "--grammar-set", str(set_file))
    assert code == 0
    assert json.loads(out)["ml_set"] == [0]

    bad_word = tmp_path / "bad.json"
    bad_word.write_text('["a", "b"]')
    code, _, err = run(capsys, "identify", "--sample-file", str(bad_word))
    assert code == 1
    assert "array of nonnegative integers" in err


def test_enumerate_emits_reparsable_grammars(capsys):
    code, out, _ = run(capsys, "enumerate", "--theta", "2")
    assert code == 0
    parsed = [grammar_from_dict(item) for item in json.loads(out)]
    assert parsed == enumerate_grammars(Lexicon(2))


def test_sample_output_reparses_round_trip(capsys, golden_file):
    _, out, _ = run(capsys, "sample", "--grammar", golden_file, "--length", "16")
    payload = json.loads(out)
    assert grammar_from_dict(payload["grammar"]) == Grammar.from_rows([[1, 1], [1, 0]])
    assert potential_from_dict(payload["potential"]).entries == ()


def test_output_flag_writes_the_file_instead_of_stdout(capsys, tmp_path, golden_file):
    target = tmp_path / "result.json"
    code, out, _ = run(capsys, "pressure", "--grammar", golden_file,
                       "--output", str(target))
    assert code == 0
    assert out == ""
    assert json.loads(target.read_text())["pressure"] == pytest.approx(
        math.log(PHI), abs=1e-9)


def test_nonprimitive_grammar_exits_1_and_names_the_matrix(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"theta": 2, "matrix": [[0, 1], [1, 0]]}))
    code, out, err = run(capsys, "pressure", "--grammar", str(bad))
    assert code == 1
    assert out == ""
    assert "not primitive" in err and "[[0, 1], [1, 0]]" in err


def test_malformed_json_exits_1_with_line_diagnostic(capsys, tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text('{"theta": 2,\n "matrix": [[1, 1], [1, 0]],}')
    code, _, err = run(capsys, "pressure", "--grammar", str(broken))
    assert code == 1
    assert "line 2" in err and "column" in err


def test_missing_file_exits_1(capsys):
    code, _, err = run(capsys, "pressure", "--grammar", "no-such-file.json")
    assert code == 1
    assert "no-such-file.json" in err


def test_usage_errors_exit_1(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["pressure"])      # --grammar is required
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 1


def test_help_lists_every_subcommand(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--help"])
    assert exc.value.code == 0
    out = capsys.readouterr().out
    for name in ("pressure", "entropy", "sample", "identify", "experiment",
                 "enumerate"):
        assert name in out


def test_experiment_subcommand_json_and_csv(capsys, tmp_path):
    config = {
        "experiment": "smb",
        "true_grammar": {"theta": 2, "matrix": [[1, 1], [1, 0]]},
        "checkpoints": [50, 200],
        "seeds": 5,
    }
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(config))
    code, out, _ = run(capsys, "experiment", "--config", str(cfg))
    assert code == 0
    report = json.loads(out)
    assert report["experiment"] == "smb"
    assert [row["n"] for row in report["curve"]] == [50, 200]

    code, out, _ = run(capsys, "experiment", "--config", str(cfg),
                       "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "n,frequency,mean_score_gap"
    assert len(lines) == 3


def test_experiment_seed_flag_overrides_base_seed(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "experiment": "smb",
        "true_grammar": {"theta": 2, "matrix": [[1, 1], [1, 0]]},
        "checkpoints": [100],
        "seeds": 3,
    }))
    _, base_out, _ = run(capsys, "experiment", "--config", str(cfg))
    _, same, _ = run(capsys, "experiment", "--config", str(cfg))
    _, moved, _ = run(capsys, "experiment", "--config", str(cfg), "--seed", "9")
    assert base_out == same
    assert json.loads(moved)["config"]["base_seed"] == 9
    assert moved != base_out


def test_unknown_config_field_is_named(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"experiment": "smb", "wat": 1}))
    code, _, err = run(capsys, "experiment", "--config", str(cfg))
    assert code == 1
    assert "wat" in err


def test_repeated_invocations_are_byte_identical(capsys, golden_file):
    _, first, _ = run(capsys, "sample", "--grammar", golden_file,
                      "--length", "200", "--seed", "1")
    _, second, _ = run(capsys, "sample", "--grammar", golden_file,
                       "--length", "200", "--seed", "1")
    assert first == second
