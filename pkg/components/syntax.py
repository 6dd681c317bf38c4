"""Terms of the λΠ-calculus modulo rewriting, the input-language parser and the printer.

Application spines are left-nested: ``f t1 t2`` is ``App(App(Sym("f"), t1), t2)``.
Equality of :class:`Term` objects is syntactic; use :func:`alpha_eq` for α-equivalence.
"""
import logging
from dataclasses import dataclass
from typing import (
    Dict,
    FrozenSet,
    Hashable,
    List,
    Mapping,
    NamedTuple,
    Optional,
    Sequence,
    Set,
    Tuple,
    Union,
)

from components.const import (
    ARROW_BINDER,
    IDENT_PATTERN,
    KEYWORDS,
    OPERATOR_PATTERN,
    UNICODE_ALIASES,
    WILDCARD,
    WILDCARD_PREFIX,
)
from components.errorhandler import CheckerError
from components.util import did_you_mean

logger = logging.getLogger(__name__)

Position = Tuple[int, ...]

TYPE = "TYPE"
KIND = "KIND"


class Term:
    """Base class of all terms."""

    __slots__ = ()


@dataclass(frozen=True)
class Sort(Term):
    tag: str


@dataclass(frozen=True)
class Var(Term):
    name: str


@dataclass(frozen=True)
class Sym(Term):
    name: str


@dataclass(frozen=True)
class Prod(Term):
    binder: str
    domain: Term
    codomain: Term


@dataclass(frozen=True)
class App(Term):
    fun: Term
    arg: Term


@dataclass(frozen=True)
class Abs(Term):
    binder: str
    domain: Term
    body: Term


TYPE_SORT = Sort(TYPE)
KIND_SORT = Sort(KIND)


@dataclass(frozen=True)
class SymbolDecl:
    name: str
    type: Term
    line: int = 0


@dataclass(frozen=True)
class RuleDecl:
    lhs: Term
    rhs: Term
    line: int = 0

    @property
    def head(self) -> str:
        return head_symbol(self.lhs) or ""

    @property
    def args(self) -> List[Term]:
        return spine(self.lhs)[1]


@dataclass(frozen=True)
class InfixDecl:
    operator: str
    name: str
    line: int = 0


Declaration = Union[SymbolDecl, RuleDecl, InfixDecl]


class ParseError(CheckerError):
    def __init__(self, message: str, line: int = 0, column: int = 0) -> None:
        self.message = message
        self.line = line
        self.column = column
        super().__init__(f"{line}:{column}: {message}" if line else message)


# ------------------------------------------------------------------------------------------------
# Basic term queries


def spine(term: Term) -> Tuple[Term, List[Term]]:
    """Splits ``h t1 … tn`` into ``(h, [t1, …, tn])``."""
    args: List[Term] = []
    while isinstance(term, App):
        args.append(term.arg)
        term = term.fun
    args.reverse()
    return term, args


def apply_spine(head: Term, args: Sequence[Term]) -> Term:
    for arg in args:
        head = App(head, arg)
    return head


def head_symbol(term: Term) -> Optional[str]:
    head, _ = spine(term)
    return head.name if isinstance(head, Sym) else None


def free_vars(term: Term) -> FrozenSet[str]:
    if isinstance(term, Var):
        return frozenset((term.name,))
    if isinstance(term, App):
        return free_vars(term.fun) | free_vars(term.arg)
    if isinstance(term, (Prod, Abs)):
        body = term.codomain if isinstance(term, Prod) else term.body
        return free_vars(term.domain) | (free_vars(body) - {term.binder})
    return frozenset()


def symbols_of(term: Term) -> FrozenSet[str]:
    """Every symbol occurring anywhere in ``term``, type annotations included."""
    if isinstance(term, Sym):
        return frozenset((term.name,))
    if isinstance(term, App):
        return symbols_of(term.fun) | symbols_of(term.arg)
    if isinstance(term, Prod):
        return symbols_of(term.domain) | symbols_of(term.codomain)
    if isinstance(term, Abs):
        return symbols_of(term.domain) | symbols_of(term.body)
    return frozenset()


def children(term: Term) -> Tuple[Term, ...]:
    if isinstance(term, App):
        return term.fun, term.arg
    if isinstance(term, Prod):
        return term.domain, term.codomain
    if isinstance(term, Abs):
        return term.domain, term.body
    return ()


def with_children(term: Term, new: Sequence[Term]) -> Term:
    if isinstance(term, App):
        return App(new[0], new[1])
    if isinstance(term, Prod):
        return Prod(term.binder, new[0], new[1])
    if isinstance(term, Abs):
        return Abs(term.binder, new[0], new[1])
    return term


def structural_subterms(term: Term) -> List[Tuple[Position, Term]]:
    """Subterms in leftmost-outermost preorder, under binders too.

    An application ``h t1 … tn`` contributes itself, its head and its arguments, never a
    partial application such as ``h t1``. Positions address application nodes, so
    :func:`subterm_at` finds every listed subterm.
    """
    result: List[Tuple[Position, Term]] = []
    stack: List[Tuple[Position, Term]] = [((), term)]
    while stack:
        position, current = stack.pop()
        result.append((position, current))
        head, args = spine(current)
        if args:
            parts = [(position + (0,) * len(args), head)]
            parts += [
                (position + (0,) * (len(args) - 1 - index) + (1,), arg)
                for index, arg in enumerate(args)
            ]
        else:
            parts = [(position + (index,), child) for index, child in enumerate(children(current))]
        stack.extend(reversed(parts))
    return result


def subterm_at(term: Term, position: Position) -> Term:
    for index in position:
        term = children(term)[index]
    return term


def replace_at(term: Term, position: Position, replacement: Term) -> Term:
    if not position:
        return replacement
    parts = list(children(term))
    parts[position[0]] = replace_at(parts[position[0]], position[1:], replacement)
    return with_children(term, parts)


def alpha_key(term: Term, _bound: Tuple[str, ...] = ()) -> Hashable:
    """A hashable key such that two terms have equal keys iff they are α-equivalent."""
    if isinstance(term, Var):
        for depth, name in enumerate(reversed(_bound)):
            if name == term.name:
                return ("#", depth)
        return ("v", term.name)
    if isinstance(term, Sym):
        return ("s", term.name)
    if isinstance(term, Sort):
        return ("*", term.tag)
    if isinstance(term, App):
        return ("@", alpha_key(term.fun, _bound), alpha_key(term.arg, _bound))
    if isinstance(term, Prod):
        return (
            "Π",
            alpha_key(term.domain, _bound),
            alpha_key(term.codomain, _bound + (term.binder,)),
        )
    if isinstance(term, Abs):
        return (
            "λ",
            alpha_key(term.domain, _bound),
            alpha_key(term.body, _bound + (term.binder,)),
        )
    raise TypeError(f"not a term: {term!r}")


def alpha_eq(left: Term, right: Term) -> bool:
    return left == right or alpha_key(left) == alpha_key(right)


def is_wildcard(name: str) -> bool:
    return name.startswith(WILDCARD_PREFIX)


def fresh_name(base: str, avoid: Set[str]) -> str:
    candidate = base
    while candidate in avoid:
        candidate += "'"
    return candidate


def product_arity(term: Term) -> int:
    """The number of leading products of ``term``."""
    arity = 0
    while isinstance(term, Prod):
        arity += 1
        term = term.codomain
    return arity


def telescope(term: Term) -> Tuple[List[Tuple[str, Term]], Term]:
    """Splits ``Πx1:T1…Πxn:Tn.U`` (U not a product) into ``([(x1, T1), …], U)``."""
    binders: List[Tuple[str, Term]] = []
    while isinstance(term, Prod):
        binders.append((term.binder, term.domain))
        term = term.codomain
    return binders, term


# ------------------------------------------------------------------------------------------------
# Printing


def print_term(term: Term, infix: Optional[Mapping[str, str]] = None) -> str:
    """Prints ``term`` with minimal parenthesization.

    Args:
        term: The term to print.
        infix: Optional. Maps symbol names to the infix operator they are written with.
    """
    return _Printer(infix or {}).show(term, 0)


class _Printer:
    # levels: 0 binders and arrows, 1 infix operators, 2 applications, 3 atoms
    def __init__(self, infix: Mapping[str, str]) -> None:
        self.infix = infix

    @staticmethod
    def _wrap(text: str, needed: bool) -> str:
        return f"({text})" if needed else text

    def show(self, term: Term, level: int) -> str:
        if isinstance(term, Var):
            return WILDCARD if is_wildcard(term.name) else term.name
        if isinstance(term, Sym):
            return term.name
        if isinstance(term, Sort):
            return term.tag
        if isinstance(term, Prod):
            if term.binder not in free_vars(term.codomain):
                text = f"{self.show(term.domain, 1)} -> {self.show(term.codomain, 0)}"
            else:
                text = (
                    f"!{term.binder} : {self.show(term.domain, 0)}, "
                    f"{self.show(term.codomain, 0)}"
                )
            return self._wrap(text, level > 0)
        if isinstance(term, Abs):
            text = f"\\{term.binder} : {self.show(term.domain, 0)}, {self.show(term.body, 0)}"
            return self._wrap(text, level > 0)
        if isinstance(term, App):
            head, args = spine(term)
            if isinstance(head, Sym) and head.name in self.infix and len(args) == 2:
                text = (
                    f"{self.show(args[0], 1)} {self.infix[head.name]} {self.show(args[1], 2)}"
                )
                return self._wrap(text, level > 1)
            text = " ".join([self.show(head, 3)] + [self.show(arg, 3) for arg in args])
            return self._wrap(text, level > 2)
        raise TypeError(f"not a term: {term!r}")


# ------------------------------------------------------------------------------------------------
# Lexing


class Token(NamedTuple):
    kind: str
    value: str
    line: int
    column: int


_PUNCTUATION = {
    "(": "LPAREN",
    ")": "RPAREN",
    ",": "COMMA",
    ".": "DOT",
    "\\": "LAMBDA",
    "!": "FORALL",
}


def tokenize(text: str) -> List[Token]:
    for alias, ascii_form in UNICODE_ALIASES.items():
        text = text.replace(alias, ascii_form)

    tokens: List[Token] = []
    line, line_start, index = 1, 0, 0
    while index < len(text):
        char = text[index]
        column = index - line_start + 1
        if char == "\n":
            line, line_start = line + 1, index + 1
            index += 1
        elif char.isspace():
            index += 1
        elif text.startswith("//", index):
            end = text.find("\n", index)
            index = len(text) if end == -1 else end
        elif char == '"':
            end = text.find('"', index + 1)
            if end == -1 or "\n" in text[index:end]:
                raise ParseError("unterminated string", line, column)
            tokens.append(Token("STRING", text[index + 1 : end], line, column))
            index = end + 1
        elif text.startswith(":=", index):
            tokens.append(Token("DEFINE", ":=", line, column))
            index += 2
        elif char == ":":
            tokens.append(Token("COLON", ":", line, column))
            index += 1
        elif char in _PUNCTUATION:
            tokens.append(Token(_PUNCTUATION[char], char, line, column))
            index += 1
        elif char == WILDCARD and not IDENT_PATTERN.match(text, index + 1):
            tokens.append(Token("WILDCARD", WILDCARD, line, column))
            index += 1
        elif match := IDENT_PATTERN.match(text, index):
            tokens.append(Token("IDENT", match.group(), line, column))
            index = match.end()
        elif match := OPERATOR_PATTERN.match(text, index):
            value = match.group()
            kind = {"->": "ARROW", "-->": "RULE_ARROW"}.get(value, "OP")
            tokens.append(Token(kind, value, line, column))
            index = match.end()
        else:
            raise ParseError(f"unexpected character {char!r}", line, column)
    tokens.append(Token("EOF", "", line, index - line_start + 1))
    return tokens


# ------------------------------------------------------------------------------------------------
# Parsing

_LHS, _RHS, _TYPE = "lhs", "rhs", "type"


class _Parser:
    def __init__(self, text: str) -> None:
        self.tokens = tokenize(text)
        self.index = 0
        self.symbols: Dict[str, Term] = {}
        self.infix: Dict[str, str] = {}
        # per rule state
        self.mode = _TYPE
        self.pattern_vars: Dict[str, None] = {}
        self.wildcards = 0

    # token helpers

    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.index + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        token = self.peek()
        self.index += 1
        return token

    def expect(self, kind: str, what: str) -> Token:
        token = self.peek()
        if token.kind != kind:
            found = token.value or "end of file"
            raise ParseError(f"expected {what}, found {found!r}", token.line, token.column)
        return self.advance()

    def error(self, message: str, token: Optional[Token] = None) -> ParseError:
        token = token or self.peek()
        return ParseError(message, token.line, token.column)

    # declarations

    def parse_file(self) -> List[Declaration]:
        declarations: List[Declaration] = []
        while self.peek().kind != "EOF":
            token = self.peek()
            if token.kind == "IDENT" and token.value == "symbol":
                declarations.append(self.symbol_declaration())
            elif token.kind == "IDENT" and token.value == "rule":
                declarations.append(self.rule_declaration())
            elif token.kind == "IDENT" and token.value == "infix":
                declarations.append(self.infix_declaration())
            else:
                raise self.error(f"expected 'symbol', 'rule' or 'infix', found {token.value!r}")
        return declarations

    def symbol_declaration(self) -> SymbolDecl:
        start = self.advance()
        name_token = self.expect("IDENT", "a symbol name")
        name = name_token.value
        if name in KEYWORDS:
            raise self.error(f"{name!r} is a keyword", name_token)
        if name in self.symbols:
            raise self.error(f"symbol {name!r} is declared twice", name_token)
        self.expect("COLON", "':'")
        self.mode = _TYPE
        declared_type = self.term({})
        self.expect("DOT", "'.' at the end of the declaration")
        self.symbols[name] = declared_type
        return SymbolDecl(name=name, type=declared_type, line=start.line)

    def rule_declaration(self) -> RuleDecl:
        start = self.advance()
        self.mode, self.pattern_vars, self.wildcards = _LHS, {}, 0
        lhs = self.term({})
        self.expect("RULE_ARROW", "'-->'")
        if head_symbol(lhs) is None:
            raise self.error("the left-hand side of a rule must be headed by a symbol", start)
        self.mode = _RHS
        rhs = self.term({})
        self.expect("DOT", "'.' at the end of the rule")
        self.mode = _TYPE
        escaped = free_vars(rhs) - free_vars(lhs)
        if escaped:
            raise self.error(
                f"variables {sorted(escaped)} of the right-hand side do not occur in the "
                "left-hand side",
                start,
            )
        return RuleDecl(lhs=lhs, rhs=rhs, line=start.line)

    def infix_declaration(self) -> InfixDecl:
        start = self.advance()
        operator = self.expect("STRING", "an operator string")
        if not OPERATOR_PATTERN.fullmatch(operator.value) or operator.value in ("->", "-->"):
            raise self.error(f"{operator.value!r} cannot be used as an infix operator", operator)
        self.expect("DEFINE", "':='")
        name_token = self.expect("IDENT", "a symbol name")
        if name_token.value not in self.symbols:
            raise self.error(self.unknown_message(name_token.value), name_token)
        self.expect("DOT", "'.' at the end of the declaration")
        self.infix[operator.value] = name_token.value
        return InfixDecl(operator=operator.value, name=name_token.value, line=start.line)

    # terms

    def term(self, scope: Dict[str, None]) -> Term:
        token = self.peek()
        if token.kind in ("FORALL", "LAMBDA"):
            self.advance()
            binders = self.binders(scope)
            self.expect("COMMA", "',' after the binders")
            inner = dict(scope)
            inner.update((name, None) for name, _ in binders)
            body = self.term(inner)
            for name, domain in reversed(binders):
                if token.kind == "FORALL":
                    body = Prod(name, domain, body)
                else:
                    body = Abs(name, domain, body)
            return body
        left = self.operator_term(scope)
        if self.peek().kind == "ARROW":
            self.advance()
            return Prod(ARROW_BINDER, left, self.term(scope))
        return left

    def binders(self, scope: Dict[str, None]) -> List[Tuple[str, Term]]:
        inner = dict(scope)
        binders: List[Tuple[str, Term]] = []
        if self.peek().kind == "LPAREN":
            while self.peek().kind == "LPAREN":
                self.advance()
                binders.append(self.binder(inner))
                inner[binders[-1][0]] = None
                self.expect("RPAREN", "')'")
        else:
            binders.append(self.binder(inner))
        return binders

    def binder(self, scope: Dict[str, None]) -> Tuple[str, Term]:
        token = self.expect("IDENT", "a binder name")
        if token.value in KEYWORDS:
            raise self.error(f"{token.value!r} is a keyword", token)
        if token.value in self.symbols:
            raise self.error(f"binder {token.value!r} would shadow the symbol of that name", token)
        self.expect("COLON", "':'")
        return token.value, self.term(scope)

    def operator_term(self, scope: Dict[str, None]) -> Term:
        left = self.application(scope)
        while self.peek().kind == "OP":
            operator = self.advance()
            if operator.value not in self.infix:
                raise self.error(f"operator {operator.value!r} is not declared infix", operator)
            right = self.application(scope)
            left = App(App(Sym(self.infix[operator.value]), left), right)
        return left

    def starts_atom(self) -> bool:
        token = self.peek()
        if token.kind == "IDENT":
            return token.value not in KEYWORDS or token.value in (TYPE, KIND)
        return token.kind in ("WILDCARD", "LPAREN")

    def application(self, scope: Dict[str, None]) -> Term:
        if not self.starts_atom():
            token = self.peek()
            raise self.error(f"expected a term, found {token.value or 'end of file'!r}")
        term = self.atom(scope)
        while self.starts_atom():
            term = App(term, self.atom(scope))
        return term

    def atom(self, scope: Dict[str, None]) -> Term:
        token = self.advance()
        if token.kind == "LPAREN":
            inner = self.term(scope)
            self.expect("RPAREN", "')'")
            return inner
        if token.kind == "WILDCARD":
            if self.mode != _LHS:
                raise self.error("'_' may only occur in the left-hand side of a rule", token)
            self.wildcards += 1
            name = f"{WILDCARD_PREFIX}{self.wildcards}"
            self.pattern_vars[name] = None
            return Var(name)
        name = token.value
        if name == TYPE:
            return TYPE_SORT
        if name == KIND:
            raise self.error("KIND cannot be written in input files", token)
        if name in scope:
            return Var(name)
        if self.mode == _RHS and name in self.pattern_vars:
            return Var(name)
        if name in self.symbols:
            return Sym(name)
        if self.mode == _LHS:
            self.pattern_vars[name] = None
            return Var(name)
        if self.mode == _RHS:
            raise self.error(
                f"variable {name!r} of the right-hand side does not occur in the left-hand side",
                token,
            )
        raise self.error(self.unknown_message(name), token)

    def unknown_message(self, name: str) -> str:
        message = f"unknown identifier {name!r}"
        suggestion = did_you_mean(name, self.symbols)
        if suggestion:
            message += f"; did you mean {suggestion!r}?"
        return message


def parse_file(text: str) -> List[Declaration]:
    """Parses a whole input file into its declarations, in file order."""
    declarations = _Parser(text).parse_file()
    logger.debug("Parsed %d declarations", len(declarations))
    return declarations


def parse_term(
    text: str, symbols: Sequence[str] = (), infix: Optional[Mapping[str, str]] = None
) -> Term:
    """Parses a closed term over the given symbols. Undeclared identifiers become variables."""
    parser = _Parser(text)
    parser.symbols = {name: TYPE_SORT for name in symbols}
    parser.infix = dict(infix or {})
    parser.mode = _LHS
    term = parser.term({})
    parser.expect("EOF", "end of input")
    return term
