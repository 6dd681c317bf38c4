import logging
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

from components.const import (
    DEFAULT_FUEL,
    DEFAULT_FUZZ_DEPTH,
    DEFAULT_FUZZ_MAX_NODES,
    DEFAULT_FUZZ_SEEDS,
    FAIL,
    REASON_SKIPPED_TYPING,
    REASON_UNDECIDED_FUEL,
    UNKNOWN,
    VERDICT_MAYBE,
    VERDICT_TERMINATING,
)
from components.deppairs import audit_precedence, check_condition_c, extract_dependency_pairs
from components.errorhandler import error_handler
from components.fuzz import fuzz_nontermination
from components.outcomes import BaseOutcome, Report, RuleOutcome
from components.sct import (
    build_call_graph,
    build_matrix,
    check_sct,
    loop_inventory,
    transitive_closure,
)
from components.signature import (
    Precedence,
    Signature,
    build_precedence,
    check_condition_a,
    check_condition_b,
)
from components.syntax import Term, parse_file
from components.typecheck import (
    TypingError,
    Undecided,
    check_condition_d,
    check_declaration_types,
    check_pfp,
    infer_rule_environment,
)

logger = logging.getLogger(__name__)


@dataclass
class AnalysisOptions:
    fuel: int = DEFAULT_FUEL
    skip_typing: bool = False
    fuzz: bool = False
    fuzz_seeds: int = DEFAULT_FUZZ_SEEDS
    fuzz_depth: int = DEFAULT_FUZZ_DEPTH
    fuzz_max_nodes: int = DEFAULT_FUZZ_MAX_NODES
    # report 0 ms so that JSON output can be compared byte for byte
    timing: bool = True


def _failures(title: str, outcomes: Sequence[BaseOutcome]) -> List[str]:
    return [
        f"{title} fails for {outcome.subject}: {outcome.reason}"
        for outcome in outcomes
        if outcome.status == FAIL
    ]


def _type_rules(
    signature: Signature, precedence: Precedence, report: Report, options: AnalysisOptions
) -> Dict[int, List[Tuple[str, Term]]]:
    """Runs condition (d) and plain function-passing rule by rule, in file order."""
    environments = {}
    for index, rule in enumerate(signature.rules):
        text = signature.show_rule(rule)
        try:
            environment = infer_rule_environment(rule, signature, options.fuel)
        except TypingError as exc:
            report.condition_d.append(RuleOutcome(index, text, FAIL, str(exc)))
            report.pfp.append(RuleOutcome(index, text, FAIL, str(exc)))
            continue
        except Undecided:
            report.condition_d.append(RuleOutcome(index, text, UNKNOWN, REASON_UNDECIDED_FUEL))
            report.pfp.append(RuleOutcome(index, text, UNKNOWN, REASON_UNDECIDED_FUEL))
            continue
        environments[index] = environment.entries
        report.pfp.append(check_pfp(rule, environment, signature, index))
        report.condition_d.append(
            check_condition_d(
                rule,
                environment,
                signature,
                precedence,
                report.dependency_pairs,
                options.fuel,
                index,
            )
        )
    return environments


def _verdict(report: Report) -> None:
    reasons = []
    reasons.extend(_failures("condition (b)", report.condition_b))
    reasons.extend(_failures("condition (c)", report.condition_c))
    reasons.extend(_failures("condition (d)", report.condition_d))
    reasons.extend(_failures("plain function-passing", report.pfp))
    if report.sct is not None and not report.sct.passed:
        reasons.append(f"size-change termination fails: {report.sct.reason}")
    if report.typing_skipped:
        reasons.append(REASON_SKIPPED_TYPING)
    if any(outcome.status == UNKNOWN for outcome in report.condition_d + report.pfp):
        reasons.append(REASON_UNDECIDED_FUEL)
    report.reasons = reasons
    report.verdict = VERDICT_MAYBE if reasons else VERDICT_TERMINATING


def _analyze(text: str, options: AnalysisOptions) -> Report:
    signature = Signature.from_declarations(parse_file(text))
    precedence = build_precedence(signature)
    if not options.skip_typing:
        check_declaration_types(signature, options.fuel)

    report = Report(verdict=VERDICT_MAYBE, infix=dict(signature.infix))
    report.precedence = precedence.to_json()
    report.condition_a = check_condition_a(precedence)
    report.condition_b = check_condition_b(signature.rules, signature)

    pairs = extract_dependency_pairs(signature.rules, signature)
    report.dependency_pairs = pairs
    report.condition_c = check_condition_c(pairs, signature)
    report.precedence_audit = audit_precedence(pairs, precedence, signature)

    report.matrices = [build_matrix(pair, signature) for pair in pairs]
    report.call_graph = build_call_graph(pairs, report.matrices, signature)
    report.closed_graph = transitive_closure(report.call_graph)
    report.closure_loops = loop_inventory(report.closed_graph)
    report.sct = check_sct(report.closed_graph)

    environments: Dict[int, List[Tuple[str, Term]]] = {}
    if options.skip_typing:
        report.typing_skipped = True
    else:
        environments = _type_rules(signature, precedence, report, options)

    _verdict(report)
    logger.info("Verdict: %s", report.verdict)

    if options.fuzz:
        report.fuzz_witness = fuzz_nontermination(
            signature.rules,
            signature,
            seeds=options.fuzz_seeds,
            depth=options.fuzz_depth,
            max_nodes=options.fuzz_max_nodes,
            environments=environments,
        )
    return report


def analyze(path: Union[str, Path], options: Optional[AnalysisOptions] = None) -> Report:
    """Runs every check on the file at ``path``.

    I/O, parse and signature errors give an ``ERROR`` report, failed conditions a ``MAYBE`` one.
    """
    options = options or AnalysisOptions()
    start = time.perf_counter()
    try:
        text = Path(path).read_text(encoding="utf-8")
        report = _analyze(text, options)
    except Exception as exc:  # pylint: disable=broad-except
        return error_handler(exc, str(path))
    if options.timing:
        report.timing_ms = int((time.perf_counter() - start) * 1000)
    return report
