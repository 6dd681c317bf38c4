import pytest

from components.const import FAIL, PASS
from components.signature import (
    Signature,
    SignatureError,
    build_precedence,
    check_condition_a,
    check_condition_b,
)
from components.syntax import (
    TYPE_SORT,
    App,
    RuleDecl,
    Sym,
    SymbolDecl,
    Var,
    parse_file,
    product_arity,
)
from tests.conftest import CORPUS


def test_product_arity(filter_signature):
    assert filter_signature.arity("plus") == 2
    assert filter_signature.arity("app") == 5
    assert filter_signature.arity("fil_aux") == 6
    assert filter_signature.arity("Nat") == 0
    assert product_arity(TYPE_SORT) == 0


def test_symbol_info(filter_signature):
    assert filter_signature["El"].sort_of_theta == "KIND"
    assert filter_signature["len_fil"].sort_of_theta == "TYPE"
    assert filter_signature.is_defined("fil")
    assert not filter_signature.is_defined("cons")
    assert not filter_signature.is_defined("missing")
    assert filter_signature.defined_symbols == [
        "El",
        "plus",
        "app",
        "len_fil",
        "len_fil_aux",
        "fil",
        "fil_aux",
    ]
    assert len(filter_signature.rules_for("len_fil")) == 3
    assert filter_signature.infix == {"plus": "+"}


def test_show_rule(filter_signature):
    assert filter_signature.show_rule(filter_signature.rules[2]) == "s p + q --> s (p + q)"


def test_precedence_classes(filter_signature):
    precedence = build_precedence(filter_signature)
    classes = precedence.classes
    assert ["len_fil", "len_fil_aux"] in classes
    assert ["fil", "fil_aux"] in classes
    assert sum(len(members) for members in classes) == len(list(filter_signature))
    assert filter_signature["len_fil"].prec_class == filter_signature["len_fil_aux"].prec_class


def test_precedence_order(filter_signature):
    precedence = build_precedence(filter_signature)
    assert precedence.gt("fil", "len_fil")
    assert precedence.gt("len_fil", "plus")
    assert precedence.gt("cons", "El")
    assert precedence.geq("fil", "fil_aux") and precedence.geq("fil_aux", "fil")
    assert not precedence.gt("fil", "fil_aux")
    assert not precedence.geq("plus", "fil")
    assert precedence.geq("zero", "zero")


def test_precedence_json_is_stable(filter_signature):
    first = build_precedence(filter_signature).to_json()
    second = build_precedence(filter_signature).to_json()
    assert first == second
    assert set(first) == {"classes", "edges"}


@pytest.mark.parametrize("name", CORPUS)
def test_precedence_ignores_rule_order(load, rng, name):
    signature = load(name)
    precedence = build_precedence(signature)
    classes = {info.name: info.prec_class for info in signature}
    for _ in range(10):
        rules = list(signature.rules)
        rng.shuffle(rules)
        again = build_precedence(signature, rules)
        assert again.to_json() == precedence.to_json()
        assert again.scc_of == precedence.scc_of
        assert {info.name: info.prec_class for info in signature} == classes


def test_condition_a(filter_signature):
    outcome = check_condition_a(build_precedence(filter_signature))
    assert outcome.status == PASS
    assert outcome.to_json() == {"status": PASS, "classes": outcome.classes}


def test_condition_b(load):
    signature = load("over_applied_rule.sct")
    [outcome] = check_condition_b(signature.rules, signature)
    assert outcome.status == FAIL
    assert outcome.reason == "3 arguments but plus has product arity 2"


def test_condition_b_holds_for_constants():
    signature = Signature.from_declarations(
        parse_file("symbol Nat : TYPE. symbol zero : Nat. symbol c : Nat. rule c --> zero.")
    )
    assert [outcome.status for outcome in check_condition_b(signature.rules, signature)] == [PASS]


def test_condition_b_on_filter(filter_signature):
    outcomes = check_condition_b(filter_signature.rules, filter_signature)
    assert len(outcomes) == 15
    assert all(outcome.passed for outcome in outcomes)


def test_duplicate_symbol():
    declarations = [SymbolDecl("Nat", TYPE_SORT, 1), SymbolDecl("Nat", TYPE_SORT, 2)]
    with pytest.raises(SignatureError, match="declared twice"):
        Signature.from_declarations(declarations)


def test_rule_for_undeclared_symbol():
    rule = RuleDecl(lhs=App(Sym("f"), Var("x")), rhs=Var("x"), line=3)
    with pytest.raises(SignatureError, match="line 3: rule for undeclared symbol 'f'"):
        Signature.from_declarations([SymbolDecl("Nat", TYPE_SORT, 1), rule])
