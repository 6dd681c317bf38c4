import json

import pytest

from components.analysis import AnalysisOptions, analyze
from components.const import (
    EXIT_ERROR,
    EXIT_MAYBE,
    EXIT_TERMINATING,
    REASON_SKIPPED_TYPING,
    VERDICT_ERROR,
    VERDICT_MAYBE,
    VERDICT_TERMINATING,
)
from components.sct import SCMatrix, build_call_graph, check_sct, transitive_closure
from components.syntax import alpha_eq, parse_term
from tests.conftest import FIXTURES, NOT_PROVED, TERMINATING

OPTIONS = AnalysisOptions(timing=False)


@pytest.mark.parametrize("name", TERMINATING)
def test_terminating_systems(name):
    report = analyze(FIXTURES / name, OPTIONS)
    assert report.verdict == VERDICT_TERMINATING, report.reasons
    assert report.reasons == []
    assert report.exit_code == EXIT_TERMINATING


@pytest.mark.parametrize("name", NOT_PROVED)
def test_systems_not_proved(name):
    report = analyze(FIXTURES / name, OPTIONS)
    assert report.verdict == VERDICT_MAYBE
    assert report.reasons
    assert report.exit_code == EXIT_MAYBE


def test_reasons_name_the_failing_check():
    report = analyze(FIXTURES / "app_loop.sct", OPTIONS)
    assert (
        "size-change termination fails: idempotent loop [[0, inf], [inf, inf]] on f has no -1 "
        "on its diagonal"
    ) in report.reasons

    report = analyze(FIXTURES / "over_applied_rule.sct", OPTIONS)
    assert report.reasons[0] == (
        "condition (b) fails for rule 1 (plus x y z --> z): 3 arguments but plus has product "
        "arity 2"
    )

    report = analyze(FIXTURES / "ordinals.sct", OPTIONS)
    prefix = "plain function-passing fails for rule 3"
    assert any(reason.startswith(prefix) for reason in report.reasons)


def test_missing_file(tmp_path):
    report = analyze(tmp_path / "missing.sct", OPTIONS)
    assert report.verdict == VERDICT_ERROR
    assert report.exit_code == EXIT_ERROR
    assert report.error.startswith("cannot read")


def test_syntax_error(tmp_path):
    path = tmp_path / "broken.sct"
    path.write_text("symbol Nat : TYPE", encoding="utf-8")
    report = analyze(path, OPTIONS)
    assert report.verdict == VERDICT_ERROR
    assert "expected '.'" in report.error
    assert report.to_text().startswith("verdict: ERROR\nerror: ")


def test_ill_typed_declaration(tmp_path):
    path = tmp_path / "bad.sct"
    path.write_text("symbol Nat : TYPE.\nsymbol bad : Nat Nat.\n", encoding="utf-8")
    report = analyze(path, OPTIONS)
    assert report.verdict == VERDICT_ERROR
    assert report.error.startswith("line 2: ill-formed type of bad")


def test_skip_typing():
    report = analyze(FIXTURES / "filter.sct", AnalysisOptions(timing=False, skip_typing=True))
    assert report.verdict == VERDICT_MAYBE
    assert report.reasons == [REASON_SKIPPED_TYPING]
    assert report.condition_d == [] and report.pfp == []
    assert "typing conditions were skipped" in report.to_text()


def test_filter_report(filter_report):
    assert len(filter_report.dependency_pairs) == 20
    assert len(filter_report.matrices) == 20
    assert len(filter_report.closure_loops) == 7
    assert filter_report.condition_a.passed
    assert all(outcome.passed for outcome in filter_report.precedence_audit)
    text = filter_report.to_text()
    assert text.startswith("verdict: TERMINATING\n20 dependency pairs, 7 loop matrices")
    assert "all conditions hold" in text
    assert text.endswith("assumed, not checked: local confluence, subject reduction")


def test_json_is_reproducible():
    first = json.dumps(analyze(FIXTURES / "filter.sct", OPTIONS).to_json(), indent=2)
    second = json.dumps(analyze(FIXTURES / "filter.sct", OPTIONS).to_json(), indent=2)
    assert first == second


def test_json_layout(filter_report):
    data = filter_report.to_json()
    assert set(data) == {
        "verdict",
        "reasons",
        "error",
        "assumptions",
        "conditions",
        "precedence",
        "dependency_pairs",
        "matrices",
        "closure_loops",
        "fuzz_witness",
        "timing_ms",
    }
    assert set(data["conditions"]) == {"a", "b", "c", "d", "pfp", "sct", "precedence_audit"}
    assert data["assumptions"] == {
        "local_confluence": "unchecked",
        "subject_reduction": "unchecked",
    }
    assert data["matrices"][2] == {"pair": "C", "matrix": [[-1, "inf"], ["inf", 0]]}
    assert data["dependency_pairs"][2]["lhs"] == "s p + q"
    assert data["timing_ms"] == 0
    assert data["fuzz_witness"] is None
    json.dumps(data)


def test_timing_is_reported():
    report = analyze(FIXTURES / "plus.sct", AnalysisOptions())
    assert report.timing_ms >= 0


def test_fuzzing_finds_the_loop():
    options = AnalysisOptions(timing=False, fuzz=True, fuzz_seeds=1, fuzz_depth=5)
    report = analyze(FIXTURES / "app_loop.sct", options)
    assert report.verdict == VERDICT_MAYBE
    assert report.fuzz_witness.cycle_length == 2
    assert report.to_json()["fuzz_witness"]["cycle_length"] == 2
    assert "non-termination witness: " in report.to_text()


def test_lambda_encoding_is_not_plain_function_passing():
    report = analyze(FIXTURES / "lambda.sct", OPTIONS)
    assert [outcome.status for outcome in report.pfp] == ["fail"]
    assert report.reasons[0].startswith("plain function-passing fails for rule 1")


def test_json_pairs_and_matrices_reparse(filter_report, filter_signature):
    data = filter_report.to_json()
    symbols = [info.name for info in filter_signature]
    operators = {operator: name for name, operator in filter_signature.infix.items()}
    for pair, entry in zip(filter_report.dependency_pairs, data["dependency_pairs"]):
        assert alpha_eq(parse_term(entry["lhs"], symbols, operators), pair.lhs)
        assert alpha_eq(parse_term(entry["rhs"], symbols, operators), pair.rhs)

    matrices = [SCMatrix(entry["matrix"]) for entry in data["matrices"]]
    assert matrices == filter_report.matrices
    graph = build_call_graph(filter_report.dependency_pairs, matrices, filter_signature)
    assert check_sct(transitive_closure(graph)).passed
