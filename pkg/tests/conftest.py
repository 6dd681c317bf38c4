import random
from pathlib import Path
from typing import Callable

import pytest

from components.analysis import AnalysisOptions, analyze
from components.outcomes import Report
from components.rewrite import substitute
from components.signature import Signature
from components.syntax import RuleDecl, Var, free_vars, parse_file

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

TERMINATING = ["filter.sct", "length_filter.sct", "plus.sct"]
NOT_PROVED = [
    "app_loop.sct",
    "ordinals.sct",
    "lambda.sct",
    "division.sct",
    "size_increasing.sct",
    "over_applied_rule.sct",
    "over_applied_call.sct",
    "self_typed.sct",
]
CORPUS = TERMINATING + NOT_PROVED


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text(encoding="utf-8")


def load_signature(name: str) -> Signature:
    return Signature.from_declarations(parse_file(fixture_text(name)))


def renamed_rule(rule: RuleDecl, rng: random.Random) -> RuleDecl:
    """The rule with its pattern variables renamed apart."""
    suffix = f"_{rng.randrange(1000)}"
    renaming = {name: Var(name + suffix) for name in free_vars(rule.lhs)}
    return RuleDecl(substitute(rule.lhs, renaming), substitute(rule.rhs, renaming), rule.line)


@pytest.fixture(scope="session")
def load() -> Callable[[str], Signature]:
    return load_signature


@pytest.fixture(scope="session")
def filter_signature() -> Signature:
    return load_signature("filter.sct")


@pytest.fixture(scope="session")
def filter_report() -> Report:
    return analyze(FIXTURES / "filter.sct", AnalysisOptions(timing=False))


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20190101)
