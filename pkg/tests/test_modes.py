from __future__ import annotations

import pytest

from ethoschat.errors import ProgramSyntaxError
from ethoschat.modes import (
    ModeDeclaration,
    Placemarker,
    body_predicate_order,
    mode_conformant,
    mode_language_errors,
    parse_mode_text,
)
from ethoschat.parser import parse_rule


def test_parse_mode_file(modes):
    kinds = [(d.kind, d.predicate) for d in modes]
    assert kinds == [
        ("head", "unethical"),
        ("body", "answer"),
        ("body", "not_SupportEvidence"),
        ("body", "spreadFalseBelief"),
        ("body", "exploitEmotions"),
    ]
    assert all(d.recall == 1 for d in modes)
    assert modes[1].placemarkers == (Placemarker("-", "response"),)


def test_parse_unbounded_recall():
    [decl] = [
        d
        for d in parse_mode_text("modeh(1, unethical(+x)).\nmodeb(*, answer(-x)).")
        if d.kind == "body"
    ]
    assert decl.recall is None


def test_recall_must_be_positive():
    with pytest.raises(ValueError):
        ModeDeclaration("body", 0, "p", (Placemarker("+", "x"),))


def test_mode_file_requires_head_declaration():
    with pytest.raises(ProgramSyntaxError):
        parse_mode_text("modeb(1, answer(-x)).")


def test_bad_placemarker_rejected():
    with pytest.raises(ProgramSyntaxError):
        parse_mode_text("modeh(1, unethical(?x)).")


def test_conformant_clauses(modes):
    assert mode_conformant(parse_rule("unethical(V) :- answer(V)."), modes)
    assert mode_conformant(
        parse_rule("unethical(V) :- answer(V), spreadFalseBelief(V)."), modes
    )


def test_variable_needs_a_producer(modes):
    errors = mode_language_errors(
        parse_rule("unethical(V) :- spreadFalseBelief(V)."), modes
    )
    assert any("produced" in e for e in errors)


def test_unknown_predicate_rejected(modes):
    errors = mode_language_errors(parse_rule("unethical(V) :- ask(V)."), modes)
    assert any("modeb" in e for e in errors)


def test_naf_is_outside_the_language(modes):
    errors = mode_language_errors(
        parse_rule("unethical(V) :- answer(V), not spreadFalseBelief(V)."), modes
    )
    assert any("negation" in e for e in errors)


def test_body_predicate_order(modes):
    order = body_predicate_order(modes)
    assert order["answer"] == 0
    assert order["not_SupportEvidence"] == 1
    assert order["spreadFalseBelief"] == 2
    assert order["exploitEmotions"] == 3
