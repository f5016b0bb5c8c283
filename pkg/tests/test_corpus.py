import pandas
import pytest

from probmodels.corpus import (
    ORACLE_AGREES,
    ORACLE_OFF,
    ORACLE_OVER_BUDGET,
    ORACLE_SKIPPED,
    load_cases,
    run_case,
    run_corpus,
)
from probmodels.oracle import OracleBudget


def without_timing(records):
    return [{k: v for k, v in record.items() if k != "elapsed_ms"} for record in records]


def test_manifest_lists_every_case(corpus_dir):
    cases = load_cases(corpus_dir)
    assert [case.name for case in cases] == [
        "two_decks",
        "three_dice",
        "swindler",
        "socks",
        "roundtable",
        "roundtable_improved",
    ]
    assert len({case.puzzle for case in cases}) == 5
    assert all(case.possible_file.exists() for case in cases)
    assert all(case.favorable_file.exists() for case in cases)


def test_bundled_corpus_passes():
    report = run_corpus()
    assert report.passed
    assert report.puzzle_tally() == (5, 5)
    assert report.summary() == "5/5 puzzles passed (6/6 cases)"


def test_oracle_runs_on_small_cases_only():
    report = run_corpus()
    oracle = {result.case.name: result.oracle for result in report.results}
    assert oracle["two_decks"] == ORACLE_AGREES
    assert oracle["three_dice"] == ORACLE_AGREES
    assert oracle["socks"] == ORACLE_SKIPPED
    assert oracle["roundtable"] == ORACLE_SKIPPED
    assert oracle["roundtable_improved"] == ORACLE_OFF


def test_over_budget_oracle_is_not_a_failure(corpus_dir):
    (case,) = [c for c in load_cases(corpus_dir) if c.name == "socks"]
    result = run_case(case, force_oracle=True, budget=OracleBudget(1000))
    assert result.oracle == ORACLE_OVER_BUDGET
    assert result.passed


def test_claims_are_judged(corpus_dir):
    (case,) = [c for c in load_cases(corpus_dir) if c.name == "swindler"]
    assert run_case(case).claims == {"1/2": "too high"}


def test_records_follow_the_schema():
    report = run_corpus()
    record = report.records()[-1]
    assert record["case"] == "two_decks"
    assert set(record) == {"case", "possible", "favorable", "probability", "elapsed_ms", "pass"}
    assert record["probability"] == {
        "num": 103,
        "den": 2704,
        "raw_num": 103,
        "raw_den": 2704,
        "decimal": "0.0380917",
    }


def test_records_are_ordered_by_case_name():
    names = [record["case"] for record in run_corpus().records()]
    assert names == sorted(names)


def test_runs_are_deterministic():
    first = without_timing(run_corpus().records())
    second = without_timing(run_corpus().records())
    assert first == second


def test_altered_case_fails(corpus_copy):
    (corpus_copy / "3dice_fav.in").write_text(
        "formulas(assumptions).\n  Dice1 + Dice2 + Dice3 > 8.\nend_of_list.\n"
    )
    report = run_corpus(corpus_copy)
    assert not report.passed
    failed = [result for result in report.results if not result.passed]
    assert [result.case.name for result in failed] == ["three_dice"]
    assert failed[0].favorable == 160
    assert "favorable 160 vs expected 181" in report.text()
    assert report.summary() == "4/5 puzzles passed (5/6 cases)"


def test_broken_case_is_reported_and_the_rest_still_run(corpus_copy):
    (corpus_copy / "swindler_fav.in").write_text(
        "formulas(assumptions).\n  Dice1 = Dice1 + .\nend_of_list.\n"
    )
    (corpus_copy / "socks_fav.in").write_text(
        "formulas(assumptions).\n  s(6) = 0.\nend_of_list.\n"
    )
    report = run_corpus(corpus_copy)
    failed = {result.case.name: result for result in report.results if not result.passed}
    assert sorted(failed) == ["socks", "swindler"]
    assert "TheoryParseError" in failed["swindler"].error
    assert "OutOfDomainApplication" in failed["socks"].error
    assert failed["swindler"].possible is None
    assert failed["swindler"].record()["probability"] is None
    assert "swindler: FAIL TheoryParseError" in report.text()
    assert report.summary() == "3/5 puzzles passed (4/6 cases)"


def test_direct_table_encoding_with_both_directions(corpus_copy):
    (case,) = [c for c in load_cases(corpus_copy) if c.name == "roundtable"]
    assert run_case(case).favorable == 10


def test_report_table_and_csv(tmp_path):
    report = run_corpus()
    frame = report.to_frame()
    assert list(frame["case"]) == sorted(frame["case"])
    assert frame["pass"].all()
    path = report.to_csv(tmp_path / "report.csv")
    assert path.is_absolute()
    saved = pandas.read_csv(path)
    assert list(saved["possible"]) == list(frame["possible"])


def test_missing_manifest_is_reraised(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_cases(tmp_path)
