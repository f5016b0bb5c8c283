import json
import sys
from pathlib import Path

import procrunner
import pytest

from probmodels import cli
from probmodels.corpus import default_corpus_dir

PUZZLES = default_corpus_dir()


def puzzle(name):
    return str(PUZZLES / name)


def run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    for key in ("PROBMODELS_WORKERS", "PROBMODELS_FORMAT", "PROBMODELS_LOG_CFG"):
        monkeypatch.delenv(key, raising=False)


def test_count(capsys):
    assert run(capsys, "count", puzzle("3dice_all.in"))[:2] == (0, "216\n")
    assert run(capsys, "count", puzzle("roundtable_all.in"))[:2] == (0, "120\n")


def test_count_json(capsys):
    code, out, _ = run(capsys, "count", puzzle("two_decks_all.in"), "--format", "json")
    assert code == 0
    assert json.loads(out)["count"] == 2704
    assert json.loads(out)["exhausted"] is True


def test_solve(capsys):
    code, out, _ = run(
        capsys,
        "solve",
        "--possible",
        puzzle("two_decks_all.in"),
        "--favorable",
        puzzle("two_decks_fav.in"),
    )
    assert code == 0
    assert out == "103 / 2704 = 103/2704 ≈ 0.0380917\n"


@pytest.mark.parametrize(
    "possible, favorable, line",
    [
        ("socks_all.in", "socks_fav.in", "0 / 6 = 0/1 ≈ 0"),
        ("roundtable_all.in", "roundtable_fav.in", "10 / 120 = 1/12 ≈ 0.0833333"),
        ("3dice_all.in", "3dice_fav.in", "181 / 216 = 181/216 ≈ 0.837963"),
    ],
)
def test_solve_corpus_puzzles(capsys, possible, favorable, line):
    code, out, _ = run(
        capsys, "solve", "--possible", puzzle(possible), "--favorable", puzzle(favorable)
    )
    assert (code, out) == (0, line + "\n")


def test_solve_with_claim(capsys):
    code, out, _ = run(
        capsys,
        "solve",
        "--possible",
        puzzle("3dice_all.in"),
        "--favorable",
        puzzle("swindler_fav.in"),
        "--claim",
        "1/2",
    )
    assert code == 0
    assert out.splitlines()[-1] == "claimed 1/2 is too high"


def test_text_and_json_agree(capsys):
    args = ["solve", "--possible", puzzle("roundtable_all.in")]
    args += ["--favorable", puzzle("roundtable_improved_fav.in")]
    _, text, _ = run(capsys, *args)
    _, structured, _ = run(capsys, *args, "--format", "json")
    record = json.loads(structured)
    assert text.startswith(f"{record['favorable']} / {record['possible']} = ")
    assert f"{record['probability']['num']}/{record['probability']['den']}" in text


def test_models(capsys):
    code, out, _ = run(capsys, "models", puzzle("socks_all.in"))
    assert code == 0
    assert out.splitlines() == [
        "1: s = 0 1 1 1 1 1 | W = 5",
        "2: s = 1 0 1 1 1 1 | W = 5",
        "3: s = 1 1 0 1 1 1 | W = 5",
        "4: s = 1 1 1 0 1 1 | W = 5",
        "5: s = 1 1 1 1 0 1 | W = 5",
        "6: s = 1 1 1 1 1 0 | W = 5",
    ]


def test_models_limit_notes_truncation(capsys):
    code, out, _ = run(capsys, "models", puzzle("socks_all.in"), "--limit", "2")
    assert code == 0
    assert out.splitlines() == [
        "1: s = 0 1 1 1 1 1 | W = 5",
        "2: s = 1 0 1 1 1 1 | W = 5",
        "(stopped after 2 models)",
    ]


def test_models_single_constant(capsys, tmp_path):
    path = tmp_path / "empty.in"
    path.write_text("assign(domain_size, 1).\nformulas(assumptions).\n  c = c.\nend_of_list.\n")
    code, out, _ = run(capsys, "models", str(path))
    assert (code, out) == (0, "1: c = 0\n")


def test_models_json(capsys):
    code, out, _ = run(capsys, "models", puzzle("socks_all.in"), "--format", "json")
    payload = json.loads(out)
    assert code == 0
    assert payload["truncated"] is False
    assert payload["models"][0] == {"s": [0, 1, 1, 1, 1, 1], "W": [5]}


def test_missing_file_is_a_usage_error(capsys, tmp_path):
    code, out, err = run(capsys, "count", str(tmp_path / "missing.in"))
    assert code == 1
    assert out == ""
    assert "missing.in" in err


def test_bad_arguments_are_usage_errors(capsys):
    assert run(capsys)[0] == 1
    assert run(capsys, "count")[0] == 1
    assert run(capsys, "solve", "--possible", puzzle("3dice_all.in"))[0] == 1
    assert run(capsys, "frobnicate")[0] == 1
    assert run(capsys, "models", puzzle("socks_all.in"), "--limit", "0")[0] == 1


def test_parse_error(capsys, tmp_path):
    path = tmp_path / "broken.in"
    path.write_text("formulas(assumptions).\n  Dice1 != 0.\n")
    code, out, err = run(capsys, "count", str(path))
    assert code == 2
    assert "missing end_of_list" in err


def test_semantic_errors(capsys, tmp_path):
    outside = tmp_path / "outside.in"
    outside.write_text("assign(domain_size, 3).\nformulas(assumptions).\n  f(5) = 0.\nend_of_list.\n")
    assert run(capsys, "count", str(outside))[0] == 3
    assert run(capsys, "count", puzzle("3dice_fav.in"))[0] == 3

    other_domain = tmp_path / "other.in"
    other_domain.write_text("assign(domain_size, 6).\nformulas(assumptions).\n  Dice1 = 1.\nend_of_list.\n")
    code = run(
        capsys, "solve", "--possible", puzzle("3dice_all.in"), "--favorable", str(other_domain)
    )[0]
    assert code == 3


def test_long_and_deep_formulas(capsys, tmp_path):
    length = sys.getrecursionlimit() + 200
    chain = tmp_path / "chain.in"
    disjuncts = " | ".join(["c = 7"] * length + ["c = 1"])
    chain.write_text(f"assign(domain_size, 2).\nformulas(assumptions).\n  {disjuncts}.\nend_of_list.\n")
    code, out, _ = run(capsys, "count", str(chain))
    assert (code, out) == (0, "1\n")

    deep = tmp_path / "deep.in"
    nested = "(" * length + "c = 1" + ")" * length
    deep.write_text(f"assign(domain_size, 2).\nformulas(assumptions).\n  {nested}.\nend_of_list.\n")
    code, _, err = run(capsys, "count", str(deep))
    assert code == 2
    assert "nest too deeply" in err


def test_zero_possible_models(capsys, tmp_path):
    path = tmp_path / "inconsistent.in"
    path.write_text("assign(domain_size, 2).\nformulas(assumptions).\n  c != c.\nend_of_list.\n")
    code = run(capsys, "solve", "--possible", str(path), "--favorable", puzzle("socks_fav.in"))[0]
    assert code == 4


def test_corpus(capsys):
    code, out, _ = run(capsys, "corpus")
    assert code == 0
    assert out.splitlines()[-1] == "5/5 puzzles passed (6/6 cases)"
    assert "claimed 1/26 is too high" in out


def test_corpus_json_is_deterministic(capsys):
    def records():
        code, out, _ = run(capsys, "corpus", "--format", "json")
        assert code == 0
        cases = json.loads(out)["cases"]
        for case in cases:
            del case["elapsed_ms"]
        return cases

    assert records() == records()


def test_altered_corpus_exits_with_mismatch(capsys, corpus_copy, tmp_path):
    (corpus_copy / "3dice_fav.in").write_text(
        "formulas(assumptions).\n  Dice1 + Dice2 + Dice3 > 8.\nend_of_list.\n"
    )
    csv_path = tmp_path / "report.csv"
    code, out, _ = run(
        capsys, "corpus", "--corpus-dir", str(corpus_copy), "--csv", str(csv_path)
    )
    assert code == 5
    assert "three_dice: FAIL favorable 160 vs expected 181" in out
    assert csv_path.exists()


def test_config_file_and_environment(capsys, tmp_path, monkeypatch):
    config = tmp_path / "probmodels.yaml"
    assert run(capsys, "--example-config", str(config))[0] == 0
    assert "workers: 1" in config.read_text()
    args = cli.build_parser().parse_args(["-c", str(config), "count", "x.in"])
    assert args.workers == 1
    assert args.oracle_check_limit == 100000

    monkeypatch.setenv("PROBMODELS_WORKERS", "3")
    assert cli.build_parser().parse_args(["count", "x.in"]).workers == 3
    args = cli.build_parser().parse_args(["--workers", "2", "count", "x.in"])
    assert args.workers == 2


def test_console_script_smoke():
    root = Path(__file__).parents[1]
    result = procrunner.run(
        [sys.executable, "-m", "probmodels.cli", "count", puzzle("3dice_all.in")],
        working_directory=str(root),
        print_stdout=False,
        print_stderr=False,
    )
    assert result.returncode == 0
    assert result.stdout.strip() == b"216"
