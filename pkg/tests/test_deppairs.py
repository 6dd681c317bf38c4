import random
from typing import Tuple

import pytest

from components.const import FAIL, PASS
from components.deppairs import audit_precedence, check_condition_c, extract_dependency_pairs
from components.signature import Signature, build_precedence
from components.syntax import (
    Abs,
    App,
    RuleDecl,
    Sym,
    Term,
    Var,
    parse_file,
    parse_term,
    spine,
    structural_subterms,
)
from tests.conftest import CORPUS, renamed_rule

# plus and twice are defined, s and zero are not
CALLS = """
symbol Nat : TYPE.
symbol zero : Nat.
symbol s : Nat -> Nat.
symbol plus : Nat -> Nat -> Nat.
symbol twice : (Nat -> Nat) -> Nat -> Nat.
rule plus zero q --> q.
rule twice h x --> h (h x).
"""
CALL_HEADS = ["zero", "s", "plus", "twice"]

FILTER_PAIRS = [
    "El (arrow a b) > El a",
    "El (arrow a b) > El b",
    "s p + q > p + q",
    "app a _ (cons _ x p l) q m > p + q",
    "app a _ (cons _ x p l) q m > app a p l q m",
    "len_fil a f _ (cons _ x p l) > len_fil_aux (f x) a f p l",
    "len_fil a f _ (app _ p l q m) > len_fil a f p l + len_fil a f q m",
    "len_fil a f _ (app _ p l q m) > len_fil a f p l",
    "len_fil a f _ (app _ p l q m) > len_fil a f q m",
    "len_fil_aux true a f p l > len_fil a f p l",
    "len_fil_aux false a f p l > len_fil a f p l",
    "fil a f _ (cons _ x p l) > fil_aux (f x) a f x p l",
    "fil a f _ (app _ p l q m) > app a (len_fil a f p l) (fil a f p l) (len_fil a f q m) "
    "(fil a f q m)",
    "fil a f _ (app _ p l q m) > len_fil a f p l",
    "fil a f _ (app _ p l q m) > fil a f p l",
    "fil a f _ (app _ p l q m) > len_fil a f q m",
    "fil a f _ (app _ p l q m) > fil a f q m",
    "fil_aux true a f x p l > len_fil a f p l",
    "fil_aux true a f x p l > fil a f p l",
    "fil_aux false a f x p l > fil a f p l",
]


def test_filter_pairs(filter_signature):
    pairs = extract_dependency_pairs(filter_signature.rules, filter_signature)
    assert [pair.label for pair in pairs] == [chr(ord("A") + index) for index in range(20)]
    assert [pair.describe(filter_signature.infix) for pair in pairs] == FILTER_PAIRS


def test_pair_origin(filter_signature):
    pairs = extract_dependency_pairs(filter_signature.rules, filter_signature)
    assert [pair.source_rule for pair in pairs[:5]] == [0, 0, 2, 4, 4]
    assert pairs[2].rhs_position == (1,)
    assert pairs[0].to_json(filter_signature.infix) == {
        "label": "A",
        "rule": 0,
        "lhs": "El (arrow a b)",
        "rhs": "El a",
        "position": [0],
    }


def test_calls_with_variable_heads_are_skipped(load):
    signature = load("app_loop.sct")
    pairs = extract_dependency_pairs(signature.rules, signature)
    assert [pair.describe() for pair in pairs] == ["f x y > app (f x) y", "f x y > f x"]


def test_calls_under_binders(load):
    signature = load("ordinals.sct")
    pairs = extract_dependency_pairs(signature.rules, signature)
    assert [pair.describe() for pair in pairs] == [
        "ordrec u v w (suc x) > ordrec u v w x",
        "ordrec u v w (lim f) > ordrec u v w (f n)",
    ]
    assert pairs[0].bound == frozenset()
    assert pairs[1].bound == frozenset({"n"})


def test_condition_c(filter_signature, load):
    pairs = extract_dependency_pairs(filter_signature.rules, filter_signature)
    assert all(outcome.status == PASS for outcome in check_condition_c(pairs, filter_signature))

    signature = load("over_applied_call.sct")
    pairs = extract_dependency_pairs(signature.rules, signature)
    [outcome] = check_condition_c(pairs, signature)
    assert outcome.status == FAIL
    assert outcome.reason == "h is applied to 3 arguments but has product arity 2"


def test_precedence_audit(filter_signature):
    pairs = extract_dependency_pairs(filter_signature.rules, filter_signature)
    outcomes = audit_precedence(pairs, build_precedence(filter_signature), filter_signature)
    assert len(outcomes) == 20
    assert all(outcome.passed for outcome in outcomes)


def _random_rhs(rng: random.Random, depth: int, binders: Tuple[str, ...] = ("x", "y")) -> Term:
    head = rng.choice([Var(name) for name in binders] + [Sym(name) for name in CALL_HEADS])
    if depth <= 0:
        return head
    if rng.random() < 0.2:
        binder = rng.choice(["n", "x"])
        return Abs(binder, Sym("Nat"), _random_rhs(rng, depth - 1, binders + (binder,)))
    term = head
    for _ in range(rng.randint(0, 2)):
        term = App(term, _random_rhs(rng, depth - 1, binders))
    return term


def _counted_calls(rhs: Term, signature: Signature) -> int:
    # a defined application lists its head too, which is not a call of its own
    spines = [spine(subterm) for _, subterm in structural_subterms(rhs)]
    defined = [
        args for head, args in spines if isinstance(head, Sym) and signature.is_defined(head.name)
    ]
    return len(defined) - sum(1 for args in defined if args)


def test_pair_count_matches_the_defined_subterms(rng):
    signature = Signature.from_declarations(parse_file(CALLS))
    lhs = parse_term("plus x y", ["plus"])
    for _ in range(500):
        rule = RuleDecl(lhs, _random_rhs(rng, 3))
        pairs = extract_dependency_pairs([rule], signature)
        assert len(pairs) == _counted_calls(rule.rhs, signature), signature.show(rule.rhs)
        renamed = renamed_rule(rule, rng)
        again = extract_dependency_pairs([renamed], signature)
        assert [(pair.rhs_head, pair.rhs_position) for pair in again] == [
            (pair.rhs_head, pair.rhs_position) for pair in pairs
        ]


@pytest.mark.parametrize("name", CORPUS)
def test_pair_count_on_fixtures(load, rng, name):
    signature = load(name)
    pairs = extract_dependency_pairs(signature.rules, signature)
    assert len(pairs) == sum(_counted_calls(rule.rhs, signature) for rule in signature.rules)
    renamed = [renamed_rule(rule, rng) for rule in signature.rules]
    assert len(extract_dependency_pairs(renamed, signature)) == len(pairs)
