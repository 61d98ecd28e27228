"""Hand-rolled recursive-descent parser for the rule language.

Grammar (whitespace and `%` line comments between any tokens):

    program    := rule*
    rule       := atom "."  |  atom ":-" literals "."  |  ":-" literals "."
    literals   := literal ("," literal)*
    literal    := ["not"] atom
    atom       := name [ "(" term ("," term)* ")" ]
    term       := VARIABLE | CONSTANT | name "(" simple ("," simple)* ")"
    simple     := VARIABLE | CONSTANT

Constants start lowercase and may contain interior hyphens (a hyphen counts as
part of the token only between two identifier characters, so `a-b` is one
constant but `a- b` is a syntax error). Variables start uppercase.

Errors carry 1-based line/column positions. Parsed programs are checked for
rule safety and arity consistency, so a successful parse yields a Program every
other module can trust.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import ProgramSyntaxError
from .logic import Atom, Compound, Constant, Literal, Program, Rule, Term, Variable

_IDENT_CHARS = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_")


@dataclass(frozen=True)
class Token:
    kind: str  # 'name' | 'var' | 'punct'
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "%":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch == ":" and i + 1 < n and text[i + 1] == "-":
            tokens.append(Token("punct", ":-", line, col))
            i += 2
            col += 2
            continue
        if ch in "(),.":
            tokens.append(Token("punct", ch, line, col))
            i += 1
            col += 1
            continue
        if ch in _IDENT_CHARS and not ch.isdigit():
            start, start_col = i, col
            while i < n:
                c = text[i]
                if c in _IDENT_CHARS:
                    i += 1
                    col += 1
                elif (
                    c == "-"
                    and i > start
                    and text[i - 1] in _IDENT_CHARS
                    and i + 1 < n
                    and text[i + 1] in _IDENT_CHARS
                ):
                    # interior hyphen inside a constant token
                    i += 1
                    col += 1
                else:
                    break
            word = text[start:i]
            kind = "var" if word[0].isupper() else "name"
            tokens.append(Token(kind, word, line, start_col))
            continue
        raise ProgramSyntaxError(f"unexpected character {ch!r}", line, col)
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Optional[Token]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def error(self, message: str) -> ProgramSyntaxError:
        tok = self.peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else Token("punct", "", 1, 1)
            return ProgramSyntaxError(f"{message} (at end of input)", last.line, last.column)
        return ProgramSyntaxError(f"{message} (found {tok.text!r})", tok.line, tok.column)

    def take(self, kind: Optional[str] = None, text: Optional[str] = None) -> Token:
        tok = self.peek()
        if tok is None or (kind and tok.kind != kind) or (text and tok.text != text):
            want = text or kind or "token"
            raise self.error(f"expected {want}")
        self.pos += 1
        return tok

    def at(self, text: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.text == text

    def parse_simple_term(self) -> Term:
        tok = self.peek()
        if tok is None:
            raise self.error("expected a term")
        if tok.kind == "var":
            self.pos += 1
            return Variable(tok.text)
        if tok.kind == "name":
            self.pos += 1
            return Constant(tok.text)
        raise self.error("expected a term")

    def parse_term(self) -> Term:
        tok = self.peek()
        if tok is None:
            raise self.error("expected a term")
        if tok.kind == "var":
            self.pos += 1
            return Variable(tok.text)
        if tok.kind == "name":
            self.pos += 1
            if self.at("("):
                self.take(text="(")
                args = [self.parse_simple_term()]
                while self.at(","):
                    self.take(text=",")
                    args.append(self.parse_simple_term())
                self.take(text=")")
                return Compound(tok.text, tuple(args))
            return Constant(tok.text)
        raise self.error("expected a term")

    def parse_atom(self) -> Atom:
        tok = self.take("name")
        args: list[Term] = []
        if self.at("("):
            self.take(text="(")
            args.append(self.parse_term())
            while self.at(","):
                self.take(text=",")
                args.append(self.parse_term())
            self.take(text=")")
        return Atom(tok.text, tuple(args))

    def parse_literal(self) -> Literal:
        tok = self.peek()
        if tok is not None and tok.kind == "name" and tok.text == "not":
            nxt = self.tokens[self.pos + 1] if self.pos + 1 < len(self.tokens) else None
            # `not` is a prefix only when an atom follows; `not.` would be the
            # 0-ary atom named not, which we do not allow as a naf target here.
            if nxt is not None and nxt.kind in ("name",):
                self.pos += 1
                return Literal(self.parse_atom(), naf=True)
        return Literal(self.parse_atom(), naf=False)

    def parse_rule(self) -> Rule:
        tok = self.peek()
        assert tok is not None
        head: Optional[Atom]
        if self.at(":-"):
            self.take(text=":-")
            head = None
        else:
            head = self.parse_atom()
            if self.at("."):
                self.take(text=".")
                return Rule(head, ())
            self.take(text=":-")
        body = [self.parse_literal()]
        while self.at(","):
            self.take(text=",")
            body.append(self.parse_literal())
        self.take(text=".")
        return Rule(head, tuple(body))

    def parse_program(self) -> Program:
        rules = []
        while self.peek() is not None:
            rules.append(self.parse_rule())
        return Program(tuple(rules))


def parse_program(text: str) -> Program:
    """Parse program text. Raises ProgramSyntaxError with position info,
    UnsafeRuleError for unsafe rules, ArityClashError for arity clashes."""
    return _Parser(tokenize(text)).parse_program()


def parse_rule(text: str) -> Rule:
    program = parse_program(text)
    if len(program) != 1:
        raise ProgramSyntaxError(f"expected exactly one rule, got {len(program)}", 1, 1)
    return program.rules[0]


def parse_atom(text: str) -> Atom:
    """Parse a single atom (no trailing period required)."""
    stripped = text.strip()
    if stripped.endswith("."):
        stripped = stripped[:-1]
    parser = _Parser(tokenize(stripped))
    atom = parser.parse_atom()
    if parser.peek() is not None:
        raise parser.error("trailing input after atom")
    return atom
