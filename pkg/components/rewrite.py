"""Substitution, syntactic matching and reduction by β and the user rules."""
import enum
import logging
from dataclasses import dataclass
from typing import Dict, Iterator, List, Mapping, NamedTuple, Optional, Sequence, Tuple

from components.syntax import (
    Abs,
    App,
    Position,
    Prod,
    RuleDecl,
    Sort,
    Sym,
    Term,
    Var,
    alpha_eq,
    apply_spine,
    children,
    free_vars,
    fresh_name,
    replace_at,
    spine,
)

logger = logging.getLogger(__name__)

Substitution = Dict[str, Term]

BETA = "beta"
RULE = "rule"


def substitute(term: Term, sigma: Mapping[str, Term]) -> Term:
    """Capture-avoiding simultaneous substitution."""
    if not sigma:
        return term
    if isinstance(term, Var):
        return sigma.get(term.name, term)
    if isinstance(term, (Sym, Sort)):
        return term
    if isinstance(term, App):
        return App(substitute(term.fun, sigma), substitute(term.arg, sigma))
    if isinstance(term, (Prod, Abs)):
        body = term.codomain if isinstance(term, Prod) else term.body
        domain = substitute(term.domain, sigma)
        body_vars = free_vars(body)
        inner = {
            name: value
            for name, value in sigma.items()
            if name != term.binder and name in body_vars
        }
        binder = term.binder
        if inner:
            incoming = frozenset().union(*(free_vars(value) for value in inner.values()))
            if binder in incoming:
                binder = fresh_name(binder, set(incoming | body_vars | inner.keys()))
                inner[term.binder] = Var(binder)
            body = substitute(body, inner)
        return Prod(binder, domain, body) if isinstance(term, Prod) else Abs(binder, domain, body)
    raise TypeError(f"not a term: {term!r}")


def match(pattern: Term, term: Term) -> Optional[Substitution]:
    """Matches ``term`` against ``pattern`` syntactically.

    Free variables of the pattern are the pattern variables. Repeated variables must receive
    α-equal terms. Returns ``None`` when there is no match.
    """
    sigma: Substitution = {}
    if _match(pattern, term, (), (), sigma):
        return sigma
    return None


def _match(
    pattern: Term,
    term: Term,
    pattern_bound: Tuple[str, ...],
    term_bound: Tuple[str, ...],
    sigma: Substitution,
) -> bool:
    # pylint:disable=too-many-return-statements
    if isinstance(pattern, Var):
        if pattern.name in pattern_bound:
            depth = pattern_bound[::-1].index(pattern.name)
            return (
                isinstance(term, Var)
                and term.name in term_bound
                and term_bound[::-1].index(term.name) == depth
            )
        if free_vars(term) & set(term_bound):
            return False
        if pattern.name in sigma:
            return alpha_eq(sigma[pattern.name], term)
        sigma[pattern.name] = term
        return True
    if isinstance(pattern, (Sym, Sort)):
        return pattern == term
    if type(pattern) is not type(term):
        return False
    if isinstance(pattern, App):
        return _match(pattern.fun, term.fun, pattern_bound, term_bound, sigma) and _match(
            pattern.arg, term.arg, pattern_bound, term_bound, sigma
        )
    if isinstance(pattern, (Prod, Abs)):
        assert isinstance(term, (Prod, Abs))
        pattern_body, term_body = children(pattern)[1], children(term)[1]
        return _match(
            pattern.domain, term.domain, pattern_bound, term_bound, sigma
        ) and _match(
            pattern_body,
            term_body,
            pattern_bound + (pattern.binder,),
            term_bound + (term.binder,),
            sigma,
        )
    return False


@dataclass(frozen=True)
class Reduct:
    term: Term
    kind: str
    rule_index: Optional[int]
    position: Position


class _Redex(NamedTuple):
    kind: str
    rule_index: Optional[int]
    position: Position
    contractum: Term


def _index_rules(rules: Sequence[RuleDecl]) -> Dict[Tuple[str, int], List[int]]:
    index: Dict[Tuple[str, int], List[int]] = {}
    for number, rule in enumerate(rules):
        index.setdefault((rule.head, len(rule.args)), []).append(number)
    return index


def _contract_here(
    term: Term, rules: Sequence[RuleDecl], index: Dict[Tuple[str, int], List[int]]
) -> Iterator[Tuple[str, Optional[int], Term]]:
    if isinstance(term, App) and isinstance(term.fun, Abs):
        yield BETA, None, substitute(term.fun.body, {term.fun.binder: term.arg})
    head, args = spine(term)
    if isinstance(head, Sym):
        for number in index.get((head.name, len(args)), ()):
            sigma = match(rules[number].lhs, term)
            if sigma is not None:
                yield RULE, number, substitute(rules[number].rhs, sigma)


def _redexes(term: Term, rules: Sequence[RuleDecl]) -> Iterator[_Redex]:
    index = _index_rules(rules)
    stack: List[Tuple[Position, Term]] = [((), term)]
    while stack:
        position, current = stack.pop()
        for kind, rule_index, contractum in _contract_here(current, rules, index):
            yield _Redex(kind, rule_index, position, contractum)
        parts = children(current)
        for number in reversed(range(len(parts))):
            stack.append((position + (number,), parts[number]))


def reduce_step(term: Term, rules: Sequence[RuleDecl]) -> List[Reduct]:
    """Every one-step reduct of ``term``.

    Ordered by preorder position, β before rules, rules in file order.
    """
    return [
        Reduct(
            replace_at(term, redex.position, redex.contractum),
            redex.kind,
            redex.rule_index,
            redex.position,
        )
        for redex in _redexes(term, rules)
    ]


def first_reduct(term: Term, rules: Sequence[RuleDecl]) -> Optional[Reduct]:
    """The leftmost-outermost reduct, which is ``reduce_step(term, rules)[0]``."""
    for redex in _redexes(term, rules):
        return Reduct(
            replace_at(term, redex.position, redex.contractum),
            redex.kind,
            redex.rule_index,
            redex.position,
        )
    return None


class Normalization(enum.Enum):
    NORMAL = "normal"
    FUEL_EXHAUSTED = "fuel exhausted"


class NormalizeResult(NamedTuple):
    term: Term
    status: Normalization
    steps: int

    @property
    def normal(self) -> bool:
        return self.status is Normalization.NORMAL


def normalize(term: Term, rules: Sequence[RuleDecl], fuel: int) -> NormalizeResult:
    steps = 0
    while True:
        reduct = first_reduct(term, rules)
        if reduct is None:
            return NormalizeResult(term, Normalization.NORMAL, steps)
        if steps >= fuel:
            return NormalizeResult(term, Normalization.FUEL_EXHAUSTED, steps)
        term = reduct.term
        steps += 1


def _head_contract(term: Term, rules: Sequence[RuleDecl]) -> Optional[Term]:
    head, args = spine(term)
    if isinstance(head, Abs) and args:
        contracted = substitute(head.body, {head.binder: args[0]})
        return apply_spine(contracted, args[1:])
    if isinstance(head, Sym):
        for rule in rules:
            arity = len(rule.args)
            if rule.head != head.name or arity > len(args):
                continue
            sigma = match(rule.lhs, apply_spine(head, args[:arity]))
            if sigma is not None:
                return apply_spine(substitute(rule.rhs, sigma), args[arity:])
    return None


def whnf(term: Term, rules: Sequence[RuleDecl], fuel: int) -> NormalizeResult:
    """Reduces at the head only, until the head is a variable, a symbol no rule applies to,
    a sort, a product or an unapplied abstraction."""
    steps = 0
    while True:
        contracted = _head_contract(term, rules)
        if contracted is None:
            return NormalizeResult(term, Normalization.NORMAL, steps)
        if steps >= fuel:
            return NormalizeResult(term, Normalization.FUEL_EXHAUSTED, steps)
        term = contracted
        steps += 1


class Joinability(enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


def joinable(left: Term, right: Term, rules: Sequence[RuleDecl], fuel: int) -> Joinability:
    if alpha_eq(left, right):
        return Joinability.YES
    left_nf = normalize(left, rules, fuel)
    right_nf = normalize(right, rules, fuel)
    if not (left_nf.normal and right_nf.normal):
        logger.debug("Conversion check ran out of fuel after %d steps", fuel)
        return Joinability.UNKNOWN
    return Joinability.YES if alpha_eq(left_nf.term, right_nf.term) else Joinability.NO
