import logging
from dataclasses import dataclass
from typing import Any, Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple

from components.const import FAIL, PASS
from components.outcomes import PairOutcome
from components.signature import Precedence, Signature
from components.syntax import (
    Abs,
    App,
    Position,
    Prod,
    RuleDecl,
    Sym,
    Term,
    apply_spine,
    children,
    print_term,
    spine,
)
from components.util import pair_label

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DependencyPair:
    """A call ``f l̄ > g m̄`` from the left-hand side of a rule to a defined symbol of its
    right-hand side, with every argument ``g`` is applied to at that position.

    Args:
        label: ``A``, ``B``, … in extraction order
        lhs_head: The head symbol of the rule
        lhs_args: The arguments of the left-hand side
        rhs_head: The called symbol
        rhs_args: The arguments of the call
        source_rule: Index of the rule in file order
        rhs_position: Position of the call in the right-hand side
        bound: Names bound by binders above the call
    """

    label: str
    lhs_head: str
    lhs_args: Tuple[Term, ...]
    rhs_head: str
    rhs_args: Tuple[Term, ...]
    source_rule: int
    rhs_position: Position
    bound: FrozenSet[str] = frozenset()

    @property
    def lhs(self) -> Term:
        return apply_spine(Sym(self.lhs_head), self.lhs_args)

    @property
    def rhs(self) -> Term:
        return apply_spine(Sym(self.rhs_head), self.rhs_args)

    def describe(self, infix: Optional[Mapping[str, str]] = None) -> str:
        return f"{print_term(self.lhs, infix)} > {print_term(self.rhs, infix)}"

    def to_json(self, infix: Optional[Mapping[str, str]] = None) -> Dict[str, Any]:
        return {
            "label": self.label,
            "rule": self.source_rule,
            "lhs": print_term(self.lhs, infix),
            "rhs": print_term(self.rhs, infix),
            "position": list(self.rhs_position),
        }


def _maximal_spines(rhs: Term) -> List[Tuple[Position, Term, FrozenSet[str]]]:
    """Subterms in preorder that are not the function part of an application, with the names
    bound above them."""
    found: List[Tuple[Position, Term, FrozenSet[str]]] = []
    stack: List[Tuple[Position, Term, FrozenSet[str], bool]] = [((), rhs, frozenset(), True)]
    while stack:
        position, term, bound, maximal = stack.pop()
        if maximal:
            found.append((position, term, bound))
        parts = children(term)
        inner = bound
        if isinstance(term, (Prod, Abs)):
            inner = bound | {term.binder}
        pending = []
        for index, part in enumerate(parts):
            part_bound = inner if index == 1 and isinstance(term, (Prod, Abs)) else bound
            part_maximal = not (isinstance(term, App) and index == 0)
            pending.append((position + (index,), part, part_bound, part_maximal))
        stack.extend(reversed(pending))
    return found


def extract_dependency_pairs(
    rules: Sequence[RuleDecl], signature: Signature
) -> List[DependencyPair]:
    pairs: List[DependencyPair] = []
    for index, rule in enumerate(rules):
        for position, term, bound in _maximal_spines(rule.rhs):
            head, args = spine(term)
            if isinstance(head, Sym) and signature.is_defined(head.name):
                pairs.append(
                    DependencyPair(
                        label=pair_label(len(pairs)),
                        lhs_head=rule.head,
                        lhs_args=tuple(rule.args),
                        rhs_head=head.name,
                        rhs_args=tuple(args),
                        source_rule=index,
                        rhs_position=position,
                        bound=bound,
                    )
                )
    logger.info("Extracted %d dependency pairs", len(pairs))
    return pairs


def check_condition_c(pairs: Sequence[DependencyPair], signature: Signature) -> List[PairOutcome]:
    outcomes = []
    for pair in pairs:
        arity = signature.arity(pair.rhs_head)
        text = pair.describe(signature.infix)
        if len(pair.rhs_args) <= arity:
            outcomes.append(PairOutcome(pair.label, text, PASS))
        else:
            outcomes.append(
                PairOutcome(
                    pair.label,
                    text,
                    FAIL,
                    f"{pair.rhs_head} is applied to {len(pair.rhs_args)} arguments but has "
                    f"product arity {arity}",
                )
            )
    return outcomes


def audit_precedence(
    pairs: Sequence[DependencyPair], precedence: Precedence, signature: Signature
) -> List[PairOutcome]:
    """Every pair must go from a symbol to one below or equivalent to it."""
    outcomes = []
    for pair in pairs:
        text = pair.describe(signature.infix)
        if precedence.geq(pair.lhs_head, pair.rhs_head):
            outcomes.append(PairOutcome(pair.label, text, PASS))
        else:
            outcomes.append(
                PairOutcome(
                    pair.label, text, FAIL, f"{pair.lhs_head} is not above {pair.rhs_head}"
                )
            )
    return outcomes
