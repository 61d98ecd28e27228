"""Mode declarations: the language bias that bounds what the learner may say.

A declaration is written in the style of classic ILP systems:

    modeh(1, unethical(+response)).
    modeb(1, answer(-response)).
    modeb(1, spreadFalseBelief(+response)).

The scheme's argument positions carry placemarkers: `#type` stands for a
ground term that stays put, `+type` for a consumed (input) term, `-type` for a
produced (output) term. Recall bounds how often one scheme may be used when a
most-specific clause is assembled; `*` means unbounded.

Learned clauses are evaluated bottom-up, so variable flow is read accordingly:
every variable standing at a `+` position (in the head or the body) must be
bound by a `-` position of some positive body literal. In the bundled
declarations `answer` is the single producer, which is why every learned rule
keeps an `answer` literal: it is what ties a verdict to an actual response.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import ProgramSyntaxError
from .logic import Atom, Compound, Rule, Variable

_MODE_LINE_RE = re.compile(
    r"mode(?P<kind>[hb])\(\s*(?P<recall>\*|\d+)\s*,\s*"
    r"(?P<pred>[a-z][A-Za-z0-9_]*)\s*(?:\(\s*(?P<args>[^)]*)\s*\))?\s*\)\s*\.\s*\Z"
)
_PLACEMARKER_RE = re.compile(r"(?P<mark>[+\-#])\s*(?P<type>[a-z][A-Za-z0-9_]*)\Z")


@dataclass(frozen=True)
class Placemarker:
    mark: str  # '+', '-', or '#'
    type_name: str

    def render(self) -> str:
        return f"{self.mark}{self.type_name}"


@dataclass(frozen=True)
class ModeDeclaration:
    kind: str  # 'head' | 'body'
    recall: Optional[int]  # None = unbounded
    predicate: str
    placemarkers: tuple[Placemarker, ...]

    def __post_init__(self):
        if self.kind not in ("head", "body"):
            raise ValueError(f"mode kind must be head or body, got {self.kind!r}")
        if self.recall is not None and self.recall < 1:
            raise ValueError("recall must be at least 1 when bounded")

    @property
    def arity(self) -> int:
        return len(self.placemarkers)

    def matches(self, atom: Atom) -> bool:
        return atom.predicate == self.predicate and atom.arity == self.arity

    def render(self) -> str:
        recall = "*" if self.recall is None else str(self.recall)
        args = ", ".join(p.render() for p in self.placemarkers)
        scheme = self.predicate if not args else f"{self.predicate}({args})"
        tag = "modeh" if self.kind == "head" else "modeb"
        return f"{tag}({recall}, {scheme})."


def parse_mode_text(text: str) -> list[ModeDeclaration]:
    """Parse a mode file: one declaration per line, `%` comments allowed."""
    out: list[ModeDeclaration] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("%", 1)[0].strip()
        if not line:
            continue
        m = _MODE_LINE_RE.match(line)
        if m is None:
            raise ProgramSyntaxError(f"not a mode declaration: {line!r}", lineno, 1)
        marks: list[Placemarker] = []
        args = m.group("args")
        if args:
            for piece in args.split(","):
                pm = _PLACEMARKER_RE.match(piece.strip())
                if pm is None:
                    raise ProgramSyntaxError(
                        f"bad placemarker {piece.strip()!r}", lineno, 1
                    )
                marks.append(Placemarker(pm.group("mark"), pm.group("type")))
        recall = None if m.group("recall") == "*" else int(m.group("recall"))
        kind = "head" if m.group("kind") == "h" else "body"
        out.append(ModeDeclaration(kind, recall, m.group("pred"), tuple(marks)))
    if not any(d.kind == "head" for d in out):
        raise ProgramSyntaxError("mode file declares no head scheme", 1, 1)
    return out


def head_declarations(modes: Iterable[ModeDeclaration]) -> list[ModeDeclaration]:
    return [d for d in modes if d.kind == "head"]


def body_declarations(modes: Iterable[ModeDeclaration]) -> list[ModeDeclaration]:
    return [d for d in modes if d.kind == "body"]


def matching_declaration(
    atom: Atom, declarations: Iterable[ModeDeclaration]
) -> Optional[ModeDeclaration]:
    for d in declarations:
        if d.matches(atom):
            return d
    return None


def body_predicate_order(modes: Iterable[ModeDeclaration]) -> dict[str, int]:
    """Predicate -> position in the modeb declaration list; used as the
    deterministic preference order when revisions tie."""
    order: dict[str, int] = {}
    for i, d in enumerate(body_declarations(modes)):
        order.setdefault(d.predicate, i)
    return order


def mode_language_errors(rule: Rule, modes: Iterable[ModeDeclaration]) -> list[str]:
    """Why `rule` falls outside the language the declarations generate.
    Empty list means the clause conforms.

    Checks: the head instantiates a modeh scheme, every body literal a modeb
    scheme (default negation is not part of the language), ground terms sit at
    `#` positions, and every variable at a `+` position is bound by a `-`
    position of some body literal.
    """
    decls = list(modes)
    errors: list[str] = []
    if rule.head is None:
        return [f"constraints are outside the mode language: {rule.render()}"]

    produced: set[str] = set()
    consumed: set[str] = set()

    def scan(atom: Atom, decl: ModeDeclaration) -> None:
        for term, marker in zip(atom.args, decl.placemarkers):
            if marker.mark == "#":
                if not term.is_ground():
                    errors.append(
                        f"variable {term.render()} at ground position "
                        f"{marker.render()} of {atom.predicate}"
                    )
            elif isinstance(term, Variable):
                if marker.mark == "+":
                    consumed.add(term.name)
                else:
                    produced.add(term.name)
            elif isinstance(term, Compound) and not term.is_ground():
                errors.append(
                    f"non-ground compound {term.render()} in {atom.predicate}"
                )
            # a ground term at a +/- position is just a more specific clause

    head_decl = matching_declaration(rule.head, head_declarations(decls))
    if head_decl is None:
        errors.append(f"head {rule.head.render()} matches no modeh scheme")
    else:
        for term, marker in zip(rule.head.args, head_decl.placemarkers):
            if marker.mark == "#":
                if not term.is_ground():
                    errors.append(
                        f"variable {term.render()} at ground position "
                        f"{marker.render()} of head {rule.head.predicate}"
                    )
            elif isinstance(term, Variable):
                consumed.add(term.name)

    for lit in rule.body:
        if lit.naf:
            errors.append(f"default negation outside the language: {lit.render()}")
            continue
        decl = matching_declaration(lit.atom, body_declarations(decls))
        if decl is None:
            errors.append(f"body literal {lit.atom.render()} matches no modeb scheme")
        else:
            scan(lit.atom, decl)

    unbound = consumed - produced
    for name in sorted(unbound):
        errors.append(f"variable {name} is consumed but never produced by the body")
    return errors


def mode_conformant(rule: Rule, modes: Iterable[ModeDeclaration]) -> bool:
    return not mode_language_errors(rule, modes)
