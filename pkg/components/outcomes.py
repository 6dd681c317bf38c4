from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Dict, List, Optional, Sequence, Tuple

from components.const import (
    EXIT_ERROR,
    EXIT_MAYBE,
    EXIT_TERMINATING,
    FAIL,
    PASS,
    UNCHECKED,
    VERDICT_ERROR,
    VERDICT_MAYBE,
    VERDICT_TERMINATING,
)

if TYPE_CHECKING:
    from components.deppairs import DependencyPair
    from components.fuzz import FuzzWitness
    from components.sct import CallGraph, SCMatrix


class BaseOutcome(ABC):
    """Base class for the outcome of a single check."""

    @property
    @abstractmethod
    def subject(self) -> str:
        """What was checked, e.g. ``rule 3``"""

    @property
    @abstractmethod
    def status(self) -> str:
        """One of ``pass``, ``fail`` and ``unknown``"""

    @property
    def reason(self) -> Optional[str]:
        """Diagnostic for a check that did not pass. Defaults to :obj:`None`."""
        return None

    @property
    def passed(self) -> bool:
        return self.status == PASS

    @abstractmethod
    def to_json(self) -> Dict[str, Any]:
        """JSON-compatible representation with stable keys."""

    def describe(self) -> str:
        text = f"{self.subject}: {self.status}"
        if self.reason:
            text += f" ({self.reason})"
        return text


class RuleOutcome(BaseOutcome):
    """Outcome of a per-rule check.

    Args:
        rule_index: Index of the rule in file order, starting at 0
        rule_text: The printed rule
        status: The check status
        reason: Optional. Why the check did not pass
    """

    def __init__(
        self, rule_index: int, rule_text: str, status: str, reason: Optional[str] = None
    ) -> None:
        self.rule_index = rule_index
        self.rule_text = rule_text
        self._status = status
        self._reason = reason

    @property
    def subject(self) -> str:
        return f"rule {self.rule_index + 1} ({self.rule_text})"

    @property
    def status(self) -> str:
        return self._status

    @property
    def reason(self) -> Optional[str]:
        return self._reason

    def to_json(self) -> Dict[str, Any]:
        return {
            "rule": self.rule_index,
            "text": self.rule_text,
            "status": self.status,
            "reason": self.reason,
        }


class PairOutcome(BaseOutcome):
    """Outcome of a per-dependency-pair check.

    Args:
        label: The label of the pair
        pair_text: The printed pair
        status: The check status
        reason: Optional. Why the check did not pass
    """

    def __init__(
        self, label: str, pair_text: str, status: str, reason: Optional[str] = None
    ) -> None:
        self.label = label
        self.pair_text = pair_text
        self._status = status
        self._reason = reason

    @property
    def subject(self) -> str:
        return f"pair {self.label} ({self.pair_text})"

    @property
    def status(self) -> str:
        return self._status

    @property
    def reason(self) -> Optional[str]:
        return self._reason

    def to_json(self) -> Dict[str, Any]:
        return {"pair": self.label, "status": self.status, "reason": self.reason}


class PrecedenceOutcome(BaseOutcome):
    """Well-foundedness of the strict precedence, which holds for every finite signature."""

    def __init__(self, classes: int, acyclic: bool) -> None:
        self.classes = classes
        self.acyclic = acyclic

    @property
    def subject(self) -> str:
        return "precedence"

    @property
    def status(self) -> str:
        return PASS if self.acyclic else FAIL

    @property
    def reason(self) -> Optional[str]:
        return None if self.acyclic else "the condensation has a cycle"

    def to_json(self) -> Dict[str, Any]:
        return {"status": self.status, "classes": self.classes}


@dataclass
class LoopEntry:
    """A matrix labelling a self-loop of the closed call graph."""

    symbol: str
    matrix: "SCMatrix"
    idempotent: bool
    decreasing: bool
    # labels of the pairs whose matrix this is, empty for closure-only matrices
    labels: List[str] = field(default_factory=list)

    @property
    def closure_only(self) -> bool:
        return not self.labels

    @property
    def violation(self) -> bool:
        return self.idempotent and not self.decreasing

    def to_json(self) -> Dict[str, Any]:
        return {
            "symbol": self.symbol,
            "matrix": self.matrix.to_json(),
            "idempotent": self.idempotent,
            "decreasing": self.decreasing,
            "pairs": self.labels,
            "closure_only": self.closure_only,
        }


class SCTOutcome(BaseOutcome):
    def __init__(self, failures: List[LoopEntry]) -> None:
        self.failures = failures

    @property
    def subject(self) -> str:
        return "size-change termination"

    @property
    def status(self) -> str:
        return FAIL if self.failures else PASS

    @property
    def reason(self) -> Optional[str]:
        if not self.failures:
            return None
        return "; ".join(
            f"idempotent loop {entry.matrix} on {entry.symbol} has no -1 on its diagonal"
            for entry in self.failures
        )

    def to_json(self) -> Dict[str, Any]:
        return {
            "status": self.status,
            "failures": [
                {"symbol": entry.symbol, "matrix": entry.matrix.to_json()}
                for entry in self.failures
            ],
        }


def _statuses(outcomes: Sequence[BaseOutcome]) -> List[Dict[str, Any]]:
    return [outcome.to_json() for outcome in outcomes]


@dataclass
class Report:
    """Everything one analysis found out about an input file."""

    verdict: str
    reasons: List[str] = field(default_factory=list)
    condition_a: Optional[PrecedenceOutcome] = None
    condition_b: List[RuleOutcome] = field(default_factory=list)
    condition_c: List[PairOutcome] = field(default_factory=list)
    condition_d: List[RuleOutcome] = field(default_factory=list)
    pfp: List[RuleOutcome] = field(default_factory=list)
    sct: Optional[SCTOutcome] = None
    precedence_audit: List[PairOutcome] = field(default_factory=list)
    precedence: Optional[Dict[str, Any]] = None
    dependency_pairs: List["DependencyPair"] = field(default_factory=list)
    matrices: List["SCMatrix"] = field(default_factory=list)
    closure_loops: List[LoopEntry] = field(default_factory=list)
    fuzz_witness: Optional["FuzzWitness"] = None
    # kept for the DOT export, not serialized
    call_graph: Optional["CallGraph"] = None
    closed_graph: Optional["CallGraph"] = None
    typing_skipped: bool = False
    timing_ms: int = 0
    infix: Dict[str, str] = field(default_factory=dict)
    error: Optional[str] = None
    traceback: Optional[str] = None

    @classmethod
    def from_error(cls, message: str, traceback: Optional[str] = None) -> "Report":
        return cls(verdict=VERDICT_ERROR, reasons=[message], error=message, traceback=traceback)

    @property
    def exit_code(self) -> int:
        return {
            VERDICT_TERMINATING: EXIT_TERMINATING,
            VERDICT_MAYBE: EXIT_MAYBE,
        }.get(self.verdict, EXIT_ERROR)

    @property
    def assumptions(self) -> Dict[str, str]:
        return {"local_confluence": UNCHECKED, "subject_reduction": UNCHECKED}

    def to_json(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "verdict": self.verdict,
            "reasons": self.reasons,
            "error": self.error,
            "assumptions": self.assumptions,
            "conditions": {
                "a": self.condition_a.to_json() if self.condition_a else None,
                "b": _statuses(self.condition_b),
                "c": _statuses(self.condition_c),
                "d": _statuses(self.condition_d),
                "pfp": _statuses(self.pfp),
                "sct": self.sct.to_json() if self.sct else None,
                "precedence_audit": _statuses(self.precedence_audit),
            },
            "precedence": self.precedence,
            "dependency_pairs": [pair.to_json(self.infix) for pair in self.dependency_pairs],
            "matrices": [
                {"pair": pair.label, "matrix": matrix.to_json()}
                for pair, matrix in zip(self.dependency_pairs, self.matrices)
            ],
            "closure_loops": [entry.to_json() for entry in self.closure_loops],
            "fuzz_witness": self.fuzz_witness.to_json(self.infix) if self.fuzz_witness else None,
            "timing_ms": self.timing_ms,
        }
        if self.traceback:
            data["traceback"] = self.traceback
        return data

    def to_text(self) -> str:
        lines = [f"verdict: {self.verdict}"]
        if self.error:
            lines.append(f"error: {self.error}")
            if self.traceback:
                lines.append(self.traceback.rstrip())
            return "\n".join(lines)

        checks: List[BaseOutcome] = []
        if self.condition_a:
            checks.append(self.condition_a)
        checks.extend(self.condition_b)
        checks.extend(self.condition_c)
        checks.extend(self.condition_d)
        checks.extend(self.pfp)
        if self.sct:
            checks.append(self.sct)
        failing = [check for check in checks if not check.passed]
        lines.append(
            f"{len(self.dependency_pairs)} dependency pairs, "
            f"{len(self.closure_loops)} loop matrices after closure"
        )
        if self.typing_skipped:
            lines.append("typing conditions were skipped")
        groups: List[Tuple[str, Sequence[BaseOutcome]]] = [
            ("condition (b)", self.condition_b),
            ("condition (c)", self.condition_c),
            ("condition (d)", self.condition_d),
            ("plain function-passing", self.pfp),
        ]
        for title, group in groups:
            bad = [outcome for outcome in group if not outcome.passed]
            if bad:
                lines.append(f"{title}:")
                lines.extend(f"  {outcome.describe()}" for outcome in bad)
        if self.sct and not self.sct.passed:
            lines.append("size-change termination:")
            lines.extend(
                f"  idempotent loop on {entry.symbol} without -1 on the diagonal: {entry.matrix}"
                for entry in self.sct.failures
            )
        if not failing and not self.typing_skipped:
            lines.append("all conditions hold")
        if self.fuzz_witness:
            lines.append(f"non-termination witness: {self.fuzz_witness.describe(self.infix)}")
        lines.append(
            "assumed, not checked: "
            + ", ".join(name.replace("_", " ") for name in self.assumptions)
        )
        return "\n".join(lines)
