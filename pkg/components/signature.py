import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence

import networkx as nx

from components.const import FAIL, PASS
from components.errorhandler import CheckerError
from components.outcomes import PrecedenceOutcome, RuleOutcome
from components.syntax import (
    KIND,
    TYPE,
    Declaration,
    InfixDecl,
    RuleDecl,
    Sort,
    SymbolDecl,
    Term,
    print_term,
    product_arity,
    symbols_of,
    telescope,
)

logger = logging.getLogger(__name__)

__all__ = [
    "Precedence",
    "Signature",
    "SignatureError",
    "SymbolInfo",
    "build_precedence",
    "check_condition_a",
    "check_condition_b",
    "product_arity",
]


class SignatureError(CheckerError):
    pass


@dataclass
class SymbolInfo:
    """A declared symbol.

    Args:
        name: The symbol name
        theta: The declared type
        sort_of_theta: ``KIND`` if the type ends in ``TYPE``, ``TYPE`` otherwise
        arity: The product arity of :attr:`theta`
        defined: Whether some rule has this symbol as its head
        prec_class: Identifier of the precedence class, set by :func:`build_precedence`
    """

    name: str
    theta: Term
    sort_of_theta: str
    arity: int
    defined: bool = False
    prec_class: int = -1
    line: int = 0


class Signature:
    """Declared symbols, the rules in file order and the infix table."""

    def __init__(
        self,
        symbols: Dict[str, SymbolInfo],
        rules: Sequence[RuleDecl],
        infix: Optional[Dict[str, str]] = None,
    ) -> None:
        self.symbols = symbols
        self.rules = list(rules)
        # symbol name -> operator
        self.infix = infix or {}

    @classmethod
    def from_declarations(cls, declarations: Sequence[Declaration]) -> "Signature":
        symbols: Dict[str, SymbolInfo] = {}
        rules: List[RuleDecl] = []
        infix: Dict[str, str] = {}
        for declaration in declarations:
            if isinstance(declaration, SymbolDecl):
                if declaration.name in symbols:
                    raise SignatureError(f"symbol {declaration.name!r} is declared twice")
                _, codomain = telescope(declaration.type)
                symbols[declaration.name] = SymbolInfo(
                    name=declaration.name,
                    theta=declaration.type,
                    sort_of_theta=KIND if codomain == Sort(TYPE) else TYPE,
                    arity=product_arity(declaration.type),
                    line=declaration.line,
                )
            elif isinstance(declaration, RuleDecl):
                if declaration.head not in symbols:
                    raise SignatureError(
                        f"line {declaration.line}: rule for undeclared symbol "
                        f"{declaration.head!r}"
                    )
                symbols[declaration.head].defined = True
                rules.append(declaration)
            elif isinstance(declaration, InfixDecl):
                infix.setdefault(declaration.name, declaration.operator)

        logger.info("Signature has %d symbols and %d rules", len(symbols), len(rules))
        return cls(symbols, rules, infix)

    def __getitem__(self, name: str) -> SymbolInfo:
        return self.symbols[name]

    def __contains__(self, name: object) -> bool:
        return name in self.symbols

    def __iter__(self) -> Iterator[SymbolInfo]:
        return iter(self.symbols.values())

    def theta(self, name: str) -> Term:
        return self.symbols[name].theta

    def arity(self, name: str) -> int:
        return self.symbols[name].arity

    def is_defined(self, name: str) -> bool:
        return name in self.symbols and self.symbols[name].defined

    @property
    def defined_symbols(self) -> List[str]:
        return [info.name for info in self if info.defined]

    def rules_for(self, name: str) -> List[RuleDecl]:
        return [rule for rule in self.rules if rule.head == name]

    def show(self, term: Term) -> str:
        return print_term(term, self.infix)

    def show_rule(self, rule: RuleDecl) -> str:
        return f"{self.show(rule.lhs)} --> {self.show(rule.rhs)}"


class Precedence:
    """The quasi-order ``f ⪰ g``, read off the condensation of the occurrence graph.

    An edge ``f -> g`` of :attr:`graph` means that ``g`` occurs in the type of ``f`` or in the
    right-hand side of a rule for ``f``.
    """

    def __init__(self, graph: nx.DiGraph) -> None:
        self.graph = graph
        condensation = nx.condensation(graph)
        order = list(
            nx.lexicographical_topological_sort(
                condensation, key=lambda node: min(condensation.nodes[node]["members"])
            )
        )
        renumber = {old: new for new, old in enumerate(order)}
        self.condensation: nx.DiGraph = nx.relabel_nodes(condensation, renumber)
        self.scc_of: Dict[str, int] = {
            name: renumber[old] for name, old in condensation.graph["mapping"].items()
        }
        self._below: Dict[int, FrozenSet[int]] = {
            node: frozenset(nx.descendants(self.condensation, node))
            for node in self.condensation
        }

    def members(self, scc: int) -> List[str]:
        return sorted(self.condensation.nodes[scc]["members"])

    @property
    def classes(self) -> List[List[str]]:
        return [self.members(scc) for scc in sorted(self.condensation)]

    @property
    def dag_edges(self) -> List[List[int]]:
        return sorted([source, target] for source, target in self.condensation.edges)

    def geq(self, left: str, right: str) -> bool:
        left_scc, right_scc = self.scc_of[left], self.scc_of[right]
        return left_scc == right_scc or right_scc in self._below[left_scc]

    def gt(self, left: str, right: str) -> bool:
        return self.scc_of[right] in self._below[self.scc_of[left]]

    def to_json(self) -> Dict[str, object]:
        return {"classes": self.classes, "edges": self.dag_edges}


def build_precedence(
    signature: Signature, rules: Optional[Sequence[RuleDecl]] = None
) -> Precedence:
    graph = nx.DiGraph()
    graph.add_nodes_from(sorted(info.name for info in signature))
    for info in signature:
        graph.add_edges_from((info.name, other) for other in sorted(symbols_of(info.theta)))
    for rule in signature.rules if rules is None else rules:
        graph.add_edges_from((rule.head, other) for other in sorted(symbols_of(rule.rhs)))

    precedence = Precedence(graph)
    for info in signature:
        info.prec_class = precedence.scc_of[info.name]
    logger.info("Precedence has %d classes", len(precedence.condensation))
    return precedence


def check_condition_a(precedence: Precedence) -> PrecedenceOutcome:
    # the strict part is well-founded as soon as the condensation is acyclic
    acyclic = nx.is_directed_acyclic_graph(precedence.condensation)
    return PrecedenceOutcome(classes=len(precedence.condensation), acyclic=acyclic)


def check_condition_b(rules: Sequence[RuleDecl], signature: Signature) -> List[RuleOutcome]:
    outcomes = []
    for index, rule in enumerate(rules):
        arity = signature.arity(rule.head)
        if len(rule.args) <= arity:
            outcomes.append(RuleOutcome(index, signature.show_rule(rule), PASS))
        else:
            outcomes.append(
                RuleOutcome(
                    index,
                    signature.show_rule(rule),
                    FAIL,
                    f"{len(rule.args)} arguments but {rule.head} has product arity {arity}",
                )
            )
    return outcomes
