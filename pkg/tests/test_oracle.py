import ast
from pathlib import Path

import pytest

from probmodels import oracle
from probmodels.core import ModelCount, Signature, Theory
from probmodels.exceptions import BudgetExceeded
from probmodels.oracle import (
    OracleBudget,
    assignment_space,
    brute_force_count,
    brute_force_models,
)


def test_two_decks(load):
    assert brute_force_count(load("two_decks_all.in")) == ModelCount(2704)


def test_three_dice_over_seven(merged):
    theory = merged("3dice_all.in", "3dice_fav.in")
    assert assignment_space(theory) == 343
    assert brute_force_count(theory) == ModelCount(181)


def test_sock_models(load):
    models = brute_force_models(load("socks_all.in"))
    assert [m.cell_values(load("socks_all.in").signature) for m in models] == [
        (0, 1, 1, 1, 1, 1, 5),
        (1, 0, 1, 1, 1, 1, 5),
        (1, 1, 0, 1, 1, 1, 5),
        (1, 1, 1, 0, 1, 1, 5),
        (1, 1, 1, 1, 0, 1, 5),
        (1, 1, 1, 1, 1, 0, 5),
    ]


def test_single_constant():
    (model,) = brute_force_models(Theory(1, -1, [], Signature({"c": 0})))
    assert model.function_value("c", ()) == 0


def test_budget_is_checked_before_sweeping(load):
    theory = load("roundtable_all.in")
    with pytest.raises(BudgetExceeded) as exc_info:
        brute_force_count(theory, OracleBudget(1000))
    assert exc_info.value.space == 5 ** 10
    assert exc_info.value.budget == 1000


def test_budget_must_be_positive():
    with pytest.raises(ValueError):
        OracleBudget(0)


def test_oracle_respects_max_models(load):
    theory = Theory(52, 3, load("two_decks_all.in").formulas)
    assert brute_force_count(theory) == ModelCount(3, exhausted=False)
    assert len(brute_force_models(theory)) == 3


def test_workers_keep_model_order(merged):
    theory = merged("3dice_all.in", "swindler_fav.in")
    single = [m.cell_values(theory.signature) for m in brute_force_models(theory)]
    split = [
        m.cell_values(theory.signature) for m in brute_force_models(theory, workers=2)
    ]
    assert split == single
    assert len(single) == 91


def test_oracle_shares_only_core_with_the_solver():
    tree = ast.parse(Path(oracle.__file__).read_text())
    imported = {
        node.module for node in ast.walk(tree) if isinstance(node, ast.ImportFrom)
    }
    assert "probmodels.solver" not in imported
    assert "probmodels.core" in imported
