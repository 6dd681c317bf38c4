"""Rule environments, plain function-passing and right-hand side typing below the rule head.

A right-hand side is typed in the *full* system of its rule: defined symbols may only be
introduced through a dependency pair of the rule, undefined ones freely. Types met on the way
are checked in the *below* system, where a symbol is admitted only if it is strictly smaller
than the head of the rule. The target type and the types of the rule environment come from
the declaration of the head and are checked in the plain system.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, Hashable, Iterator, List, Optional, Sequence, Tuple, Union

from components.const import DEFAULT_FUEL, FAIL, PASS, REASON_UNDECIDED_FUEL, UNKNOWN
from components.deppairs import DependencyPair
from components.errorhandler import CheckerError
from components.outcomes import RuleOutcome
from components.rewrite import Joinability, joinable, match, normalize, substitute, whnf
from components.signature import Precedence, Signature, SignatureError
from components.syntax import (
    KIND,
    KIND_SORT,
    TYPE,
    TYPE_SORT,
    Abs,
    App,
    Prod,
    RuleDecl,
    Sort,
    Sym,
    Term,
    Var,
    alpha_eq,
    alpha_key,
    apply_spine,
    free_vars,
    fresh_name,
    is_wildcard,
    spine,
    telescope,
)

logger = logging.getLogger(__name__)


class TypingError(CheckerError):
    pass


class Undecided(CheckerError):
    """A conversion could not be decided within the fuel."""


@dataclass(frozen=True)
class Full:
    symbol: str
    args: Tuple[Term, ...]


@dataclass(frozen=True)
class Below:
    symbol: str


JudgmentMode = Union[Full, Below]
Context = List[Tuple[str, Term]]


@dataclass
class Environment:
    """The typing environment of a rule.

    Args:
        entries: Pattern variables with their types, in order of first occurrence
        argument_types: The expected type of each left-hand side argument
        target: The type the right-hand side must have
    """

    entries: List[Tuple[str, Term]] = field(default_factory=list)
    argument_types: List[Term] = field(default_factory=list)
    target: Optional[Term] = None

    def __iter__(self) -> Iterator[Tuple[str, Term]]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, name: object) -> bool:
        return any(entry == name for entry, _ in self.entries)

    def __getitem__(self, name: str) -> Term:
        for entry, entry_type in reversed(self.entries):
            if entry == name:
                return entry_type
        raise KeyError(name)

    @property
    def names(self) -> List[str]:
        return [name for name, _ in self.entries]


def _rebuild(binders: Sequence[Tuple[str, Term]], codomain: Term) -> Term:
    for name, domain in reversed(binders):
        codomain = Prod(name, domain, codomain)
    return codomain


class _Mismatch(Exception):
    pass


class _PatternTyper:
    def __init__(self, rule: RuleDecl, signature: Signature, fuel: int) -> None:
        self.rule = rule
        self.signature = signature
        self.fuel = fuel
        self.pattern_vars = free_vars(rule.lhs)
        self.types: Dict[str, Term] = {}
        # idempotent: no solved variable occurs in a solution
        self.solution: Dict[str, Term] = {}

    def resolve(self, term: Term) -> Term:
        return substitute(term, self.solution)

    def bind(self, name: str, value: Term) -> None:
        if name in free_vars(value):
            raise _Mismatch
        self.solution = {
            key: substitute(solved, {name: value}) for key, solved in self.solution.items()
        }
        self.solution[name] = value

    def unknown(self, term: Term) -> Optional[str]:
        if (
            isinstance(term, Var)
            and term.name in self.pattern_vars
            and term.name not in self.solution
        ):
            return term.name
        return None

    def unify(self, left: Term, right: Term) -> None:
        snapshot = dict(self.solution)
        try:
            self._structural(left, right)
            return
        except _Mismatch:
            self.solution = snapshot
        left, right = self.resolve(left), self.resolve(right)
        left_nf = normalize(left, self.signature.rules, self.fuel)
        right_nf = normalize(right, self.signature.rules, self.fuel)
        if not (left_nf.normal and right_nf.normal):
            raise Undecided(REASON_UNDECIDED_FUEL)
        if alpha_eq(left_nf.term, left) and alpha_eq(right_nf.term, right):
            raise _Mismatch
        self._structural(left_nf.term, right_nf.term)

    def _structural(self, left: Term, right: Term) -> None:
        left, right = self.resolve(left), self.resolve(right)
        if alpha_eq(left, right):
            return
        left_name, right_name = self.unknown(left), self.unknown(right)
        if left_name and right_name:
            if is_wildcard(right_name) and not is_wildcard(left_name):
                self.bind(right_name, left)
            else:
                self.bind(left_name, right)
        elif left_name:
            self.bind(left_name, right)
        elif right_name:
            self.bind(right_name, left)
        elif isinstance(left, App) and isinstance(right, App):
            self.unify(left.fun, right.fun)
            self.unify(left.arg, right.arg)
        elif isinstance(left, Prod) and isinstance(right, Prod):
            self.unify(left.domain, right.domain)
            self._unify_bodies(left.binder, left.codomain, right.binder, right.codomain)
        elif isinstance(left, Abs) and isinstance(right, Abs):
            self.unify(left.domain, right.domain)
            self._unify_bodies(left.binder, left.body, right.binder, right.body)
        else:
            raise _Mismatch

    def _unify_bodies(self, left_binder: str, left: Term, right_binder: str, right: Term) -> None:
        name = fresh_name(left_binder, set(free_vars(left) | free_vars(right) | self.pattern_vars))
        self.unify(
            substitute(left, {left_binder: Var(name)}),
            substitute(right, {right_binder: Var(name)}),
        )

    def expect(self, pattern: Term, expected: Term) -> None:
        if isinstance(pattern, Var):
            if pattern.name in self.types:
                try:
                    self.unify(self.types[pattern.name], expected)
                except _Mismatch:
                    raise TypingError(
                        f"{pattern.name} is used at types "
                        f"{self.signature.show(self.resolve(self.types[pattern.name]))} and "
                        f"{self.signature.show(self.resolve(expected))}"
                    ) from None
            else:
                self.types[pattern.name] = expected
            return
        head, args = spine(pattern)
        if not isinstance(head, Sym):
            raise TypingError(
                f"the left-hand side is not algebraic at {self.signature.show(pattern)}"
            )
        binders, result = telescope(self.signature.theta(head.name))
        if len(args) > len(binders):
            raise TypingError(
                f"{head.name} is applied to {len(args)} arguments in the left-hand side but has "
                f"product arity {len(binders)}"
            )
        instantiation: Dict[str, Term] = {}
        for (binder, domain), arg in zip(binders, args):
            self.expect(arg, substitute(domain, instantiation))
            instantiation[binder] = arg
        actual = substitute(_rebuild(binders[len(args) :], result), instantiation)
        try:
            self.unify(actual, expected)
        except _Mismatch:
            raise TypingError(
                f"{self.signature.show(pattern)} has type "
                f"{self.signature.show(self.resolve(actual))} where "
                f"{self.signature.show(self.resolve(expected))} is expected"
            ) from None

    def run(self) -> Environment:
        binders, result = telescope(self.signature.theta(self.rule.head))
        args = self.rule.args
        if len(args) > len(binders):
            raise TypingError(
                f"{len(args)} arguments but {self.rule.head} has product arity {len(binders)}"
            )
        instantiation: Dict[str, Term] = {}
        argument_types = []
        for (binder, domain), arg in zip(binders, args):
            expected = substitute(domain, instantiation)
            argument_types.append(expected)
            self.expect(arg, expected)
            instantiation[binder] = arg
        target = substitute(_rebuild(binders[len(args) :], result), instantiation)
        return Environment(
            entries=[(name, self.resolve(value)) for name, value in self.types.items()],
            argument_types=[self.resolve(value) for value in argument_types],
            target=self.resolve(target),
        )


def infer_rule_environment(
    rule: RuleDecl, signature: Signature, fuel: int = DEFAULT_FUEL
) -> Environment:
    """Types the pattern variables of an algebraic left-hand side.

    Constructor result types are unified with the types they are expected at, so that
    ``app a _ (cons _ x p l) q m`` gives ``x : El a`` and ``l : List a p``.
    """
    return _PatternTyper(rule, signature, fuel).run()


def _applies_at_root(term: Term, signature: Signature) -> bool:
    head, args = spine(term)
    if not isinstance(head, Sym):
        return False
    for rule in signature.rules_for(head.name):
        arity = len(rule.args)
        if arity <= len(args) and match(rule.lhs, apply_spine(head, args[:arity])) is not None:
            return True
    return False


def _is_inert(term: Term, signature: Signature) -> bool:
    """Whether ``term`` is ``D t̄`` with ``D`` fully applied and no rule applying to it."""
    head, args = spine(term)
    return (
        isinstance(head, Sym)
        and head.name in signature
        and len(args) == signature.arity(head.name)
        and not _applies_at_root(term, signature)
    )


def check_pfp(
    rule: RuleDecl, environment: Environment, signature: Signature, index: int = 0
) -> RuleOutcome:
    text = signature.show_rule(rule)
    args = rule.args
    for arg in args:
        if isinstance(arg, Sort) or (
            isinstance(arg, Prod) and telescope(arg)[1] == TYPE_SORT
        ):
            return RuleOutcome(index, text, FAIL, f"{signature.show(arg)} is a kind")

    for name, var_type in environment:
        direct = [
            position for position, arg in enumerate(args) if arg == Var(name)
        ]
        if any(alpha_eq(var_type, environment.argument_types[i]) for i in direct):
            continue
        if _is_inert(var_type, signature):
            continue
        shown = "_" if is_wildcard(name) else name
        return RuleOutcome(
            index,
            text,
            FAIL,
            f"{shown} : {signature.show(var_type)} is not an argument of the left-hand side "
            "and its type is not a fully applied irreducible symbol",
        )
    return RuleOutcome(index, text, PASS)


class Typechecker:
    """Bidirectional typing with β and the rules as conversion.

    Args:
        signature: The signature to type against
        fuel: Normalization budget of every conversion check
        precedence: Optional. Required by the restricted systems
        pairs: Optional. The dependency pairs of the rule whose right-hand side is typed
    """

    def __init__(
        self,
        signature: Signature,
        fuel: int = DEFAULT_FUEL,
        precedence: Optional[Precedence] = None,
        pairs: Sequence[DependencyPair] = (),
    ) -> None:
        self.signature = signature
        self.rules = signature.rules
        self.fuel = fuel
        self.precedence = precedence
        self.pairs = list(pairs)
        # names of the introduction rules used for symbols, e.g. "dp:len_fil"
        self.trace: List[str] = []
        self._sorts: Dict[Hashable, Union[Sort, TypingError]] = {}
        self.logger = logging.getLogger(self.__class__.__qualname__)

    # conversion

    def whnf(self, term: Term) -> Term:
        result = whnf(term, self.rules, self.fuel)
        if not result.normal:
            raise Undecided(REASON_UNDECIDED_FUEL)
        return result.term

    def convert(
        self, context: Context, actual: Term, expected: Term, mode: Optional[JudgmentMode]
    ) -> None:
        if alpha_eq(actual, expected):
            return
        answer = joinable(actual, expected, self.rules, self.fuel)
        if answer is Joinability.UNKNOWN:
            raise Undecided(REASON_UNDECIDED_FUEL)
        if answer is Joinability.NO:
            raise TypingError(
                f"{self.signature.show(actual)} is not convertible to "
                f"{self.signature.show(expected)}"
            )
        if isinstance(mode, Full):
            self.sort_of(context, actual, Below(mode.symbol))
            self.sort_of(context, expected, None)

    # judgments

    def sort_of(self, context: Context, term: Term, mode: Optional[JudgmentMode]) -> Sort:
        key = (
            alpha_key(term),
            tuple((name, alpha_key(value)) for name, value in context),
            mode,
        )
        if key not in self._sorts:
            try:
                sort = self.whnf(self.infer(context, term, mode))
                if not isinstance(sort, Sort):
                    raise TypingError(f"{self.signature.show(term)} is not a type")
                self._sorts[key] = sort
            except TypingError as exc:
                self._sorts[key] = exc
        cached = self._sorts[key]
        if isinstance(cached, TypingError):
            raise cached
        return cached

    def check(
        self, context: Context, term: Term, expected: Term, mode: Optional[JudgmentMode]
    ) -> None:
        self.convert(context, self.infer(context, term, mode), expected, mode)

    def infer(self, context: Context, term: Term, mode: Optional[JudgmentMode]) -> Term:
        if isinstance(term, Sort):
            if term.tag == KIND:
                raise TypingError("KIND has no type")
            return KIND_SORT
        if isinstance(term, Var):
            for name, value in reversed(context):
                if name == term.name:
                    return value
            raise TypingError(f"unbound variable {term.name}")
        if isinstance(term, Prod):
            domain_sort = self.sort_of(context, term.domain, mode)
            if domain_sort.tag != TYPE:
                raise TypingError(f"{self.signature.show(term.domain)} is not a type of objects")
            return self.sort_of(context + [(term.binder, term.domain)], term.codomain, mode)
        if isinstance(term, Abs):
            body_type = self.infer(context + [(term.binder, term.domain)], term.body, mode)
            product = Prod(term.binder, term.domain, body_type)
            self.sort_of(context, product, self._side(mode))
            return product
        return self.infer_spine(context, term, mode)

    def infer_spine(self, context: Context, term: Term, mode: Optional[JudgmentMode]) -> Term:
        head, args = spine(term)
        if isinstance(head, Sym):
            if isinstance(mode, Full) and self.signature.is_defined(head.name):
                return self.by_pair(context, head.name, args, mode)
            function_type = self.admit(head.name, mode)
        else:
            function_type = self.infer(context, head, mode)
        for arg in args:
            function_type = self.apply(context, function_type, arg, mode)
        return function_type

    def apply(
        self, context: Context, function_type: Term, arg: Term, mode: Optional[JudgmentMode]
    ) -> Term:
        product = self.whnf(function_type)
        if not isinstance(product, Prod):
            raise TypingError(
                f"{self.signature.show(function_type)} is applied to "
                f"{self.signature.show(arg)} but is not a product"
            )
        self.check(context, arg, product.domain, mode)
        if isinstance(mode, Full):
            self.sort_of(context, product, Below(mode.symbol))
        return substitute(product.codomain, {product.binder: arg})

    def by_pair(
        self, context: Context, symbol: str, args: Sequence[Term], mode: Full
    ) -> Term:
        call = apply_spine(Sym(symbol), args)
        covered = any(
            pair.rhs_head == symbol
            and len(pair.rhs_args) == len(args)
            and all(alpha_eq(left, right) for left, right in zip(pair.rhs_args, args))
            for pair in self.pairs
        )
        if not covered:
            raise TypingError(f"no dependency pair covers {self.signature.show(call)}")
        self.trace.append(f"dp:{symbol}")
        self.check_declared_type(symbol, Below(mode.symbol))
        binders, result = telescope(self.signature.theta(symbol))
        if len(args) > len(binders):
            raise TypingError(f"{symbol} is applied to more arguments than its product arity")
        instantiation: Dict[str, Term] = {}
        for (binder, domain), arg in zip(binders, args):
            self.check(context, arg, substitute(domain, instantiation), mode)
            instantiation[binder] = arg
        return substitute(_rebuild(binders[len(args) :], result), instantiation)

    def admit(self, symbol: str, mode: Optional[JudgmentMode]) -> Term:
        if isinstance(mode, Below):
            assert self.precedence is not None
            if not self.precedence.gt(mode.symbol, symbol):
                raise TypingError(f"{symbol} is not smaller than {mode.symbol}")
            self.trace.append(f"below:{symbol}")
        elif isinstance(mode, Full):
            self.trace.append(f"const:{symbol}")
        self.check_declared_type(symbol, self._side(mode))
        return self.signature.theta(symbol)

    def check_declared_type(self, symbol: str, mode: Optional[JudgmentMode]) -> None:
        info = self.signature[symbol]
        sort = self.sort_of([], info.theta, mode)
        if sort.tag != info.sort_of_theta:
            raise TypingError(f"the type of {symbol} has sort {sort.tag}")

    @staticmethod
    def _side(mode: Optional[JudgmentMode]) -> Optional[JudgmentMode]:
        return Below(mode.symbol) if isinstance(mode, Full) else mode


def check_condition_d(
    rule: RuleDecl,
    environment: Environment,
    signature: Signature,
    precedence: Precedence,
    pairs: Sequence[DependencyPair],
    fuel: int = DEFAULT_FUEL,
    index: int = 0,
) -> RuleOutcome:
    """Types the right-hand side in the full system of the rule at its target type."""
    own_pairs = [pair for pair in pairs if pair.source_rule == index]
    checker = Typechecker(signature, fuel, precedence, own_pairs)
    text = signature.show_rule(rule)
    full = Full(rule.head, tuple(rule.args))
    context: Context = list(environment.entries)
    try:
        for name, var_type in environment.entries:
            try:
                checker.sort_of(context, var_type, None)
            except TypingError as exc:
                raise TypingError(f"type of {name}: {exc}") from None
        assert environment.target is not None
        checker.check(context, rule.rhs, environment.target, full)
    except Undecided:
        logger.debug("Rule %d: typing undecided", index + 1)
        return RuleOutcome(index, text, UNKNOWN, REASON_UNDECIDED_FUEL)
    except TypingError as exc:
        logger.debug("Rule %d: %s", index + 1, exc)
        return RuleOutcome(index, text, FAIL, str(exc))
    logger.debug("Rule %d: typed with %s", index + 1, ", ".join(checker.trace) or "no symbols")
    return RuleOutcome(index, text, PASS)


def check_declaration_types(signature: Signature, fuel: int = DEFAULT_FUEL) -> None:
    """Every declared type must be typable in the plain system, else a :class:`SignatureError`."""
    checker = Typechecker(signature, fuel)
    for info in signature:
        try:
            checker.check_declared_type(info.name, None)
        except (TypingError, Undecided) as exc:
            raise SignatureError(
                f"line {info.line}: ill-formed type of {info.name}: {exc}"
            ) from exc
