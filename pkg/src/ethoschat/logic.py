"""Abstract syntax for the rule language, plus the term-level operations every
other module leans on: substitution, safety checking, canonical rendering, and
theta-subsumption.

The language is a deliberately small answer-set-programming subset:

    head :- b1, ..., bn.     rule (bn may be prefixed with `not`)
    head.                    fact
    :- b1, ..., bn.          constraint

Terms are constants (lowercase start, interior hyphens allowed), variables
(uppercase start), or one-level compounds like `infoabout(productx)`. Deeper
nesting is rejected so grounding stays finite.

All values are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Optional

from .errors import ArityClashError, UnsafeRuleError

_CONSTANT_RE = re.compile(r"[a-z][A-Za-z0-9_]*(?:-[A-Za-z0-9_]+)*\Z")
_VARIABLE_RE = re.compile(r"[A-Z][A-Za-z0-9_]*\Z")


# --- terms -------------------------------------------------------------------


@dataclass(frozen=True)
class Term:
    """Base class; use Constant, Variable, or Compound."""

    def is_ground(self) -> bool:
        raise NotImplementedError

    def render(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class Constant(Term):
    name: str

    def __post_init__(self):
        if not _CONSTANT_RE.match(self.name):
            raise ValueError(f"invalid constant name: {self.name!r}")

    def is_ground(self) -> bool:
        return True

    def render(self) -> str:
        return self.name


@dataclass(frozen=True)
class Variable(Term):
    name: str

    def __post_init__(self):
        if not _VARIABLE_RE.match(self.name):
            raise ValueError(f"invalid variable name: {self.name!r}")

    def is_ground(self) -> bool:
        return False

    def render(self) -> str:
        return self.name


@dataclass(frozen=True)
class Compound(Term):
    """One-level structured term, e.g. infoabout(productx). Arguments must be
    constants or variables — a compound inside a compound is rejected."""

    functor: str
    args: tuple[Term, ...]

    def __post_init__(self):
        if not _CONSTANT_RE.match(self.functor):
            raise ValueError(f"invalid functor name: {self.functor!r}")
        if not self.args:
            raise ValueError("compound term needs at least one argument")
        for a in self.args:
            if isinstance(a, Compound):
                raise ValueError(f"term nesting deeper than one level: {self.render()}")

    def is_ground(self) -> bool:
        return all(a.is_ground() for a in self.args)

    def render(self) -> str:
        return f"{self.functor}({','.join(a.render() for a in self.args)})"


# --- atoms, literals, rules ---------------------------------------------------


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple[Term, ...] = ()

    def __post_init__(self):
        if not _CONSTANT_RE.match(self.predicate):
            raise ValueError(f"invalid predicate name: {self.predicate!r}")

    @property
    def arity(self) -> int:
        return len(self.args)

    def is_ground(self) -> bool:
        return all(a.is_ground() for a in self.args)

    def variables(self) -> set[str]:
        out: set[str] = set()
        for a in self.args:
            if isinstance(a, Variable):
                out.add(a.name)
            elif isinstance(a, Compound):
                out.update(x.name for x in a.args if isinstance(x, Variable))
        return out

    def render(self) -> str:
        if not self.args:
            return self.predicate
        return f"{self.predicate}({', '.join(a.render() for a in self.args)})"


@dataclass(frozen=True)
class Literal:
    """An atom, possibly under default negation. `not p(X)` holds when p(X)
    can be safely assumed false. Negation is only legal in rule bodies."""

    atom: Atom
    naf: bool = False

    def render(self) -> str:
        return f"not {self.atom.render()}" if self.naf else self.atom.render()


@dataclass(frozen=True)
class Rule:
    """head :- body. A fact has an empty body; a constraint has no head.
    Construction enforces the safety condition: every variable in the head or
    in a naf-literal must occur in some positive body literal."""

    head: Optional[Atom]
    body: tuple[Literal, ...] = ()

    def __post_init__(self):
        if self.head is None and not self.body:
            raise ValueError("a rule needs a head or a body")
        unsafe = self.unsafe_variables()
        if unsafe:
            raise UnsafeRuleError(self.render(), sorted(unsafe)[0])

    def unsafe_variables(self) -> set[str]:
        positive: set[str] = set()
        for lit in self.body:
            if not lit.naf:
                positive.update(lit.atom.variables())
        needing: set[str] = set()
        if self.head is not None:
            needing.update(self.head.variables())
        for lit in self.body:
            if lit.naf:
                needing.update(lit.atom.variables())
        return needing - positive

    @property
    def is_fact(self) -> bool:
        return self.head is not None and not self.body

    @property
    def is_constraint(self) -> bool:
        return self.head is None

    def is_ground(self) -> bool:
        head_ok = self.head is None or self.head.is_ground()
        return head_ok and all(l.atom.is_ground() for l in self.body)

    def variables(self) -> set[str]:
        out = set() if self.head is None else self.head.variables()
        for lit in self.body:
            out |= lit.atom.variables()
        return out

    def render(self) -> str:
        return render_rule(self)


@dataclass(frozen=True)
class Program:
    """A list of rules with consistent predicate and functor arities."""

    rules: tuple[Rule, ...] = ()

    def __post_init__(self):
        check_arities(self.rules)

    def __iter__(self) -> Iterator[Rule]:
        return iter(self.rules)

    def __len__(self) -> int:
        return len(self.rules)

    def extend(self, more: Iterable[Rule]) -> "Program":
        return Program(self.rules + tuple(more))

    def render(self) -> str:
        return "\n".join(r.render() for r in self.rules)


def check_arities(rules: Iterable[Rule]) -> None:
    """Predicates and functors must keep one arity across the whole program."""
    predicates: dict[str, int] = {}
    functors: dict[str, int] = {}

    def check_atom(atom: Atom, rule: Rule) -> None:
        seen = predicates.setdefault(atom.predicate, atom.arity)
        if seen != atom.arity:
            raise ArityClashError(atom.predicate, atom.arity, seen, rule.render())
        for arg in atom.args:
            if isinstance(arg, Compound):
                fseen = functors.setdefault(arg.functor, len(arg.args))
                if fseen != len(arg.args):
                    raise ArityClashError(arg.functor, len(arg.args), fseen, rule.render())

    for rule in rules:
        if rule.head is not None:
            check_atom(rule.head, rule)
        for lit in rule.body:
            check_atom(lit.atom, rule)


# --- rendering ----------------------------------------------------------------


def render_rule(rule: Rule) -> str:
    """Canonical text: one space after commas, ` :- ` separator, final period.
    Parsing the output yields the identical AST."""
    body = ", ".join(l.render() for l in rule.body)
    if rule.head is None:
        return f":- {body}."
    if not rule.body:
        return f"{rule.head.render()}."
    return f"{rule.head.render()} :- {body}."


# --- substitution ---------------------------------------------------------------

Substitution = Mapping[str, Term]


def substitute_term(term: Term, theta: Substitution) -> Term:
    if isinstance(term, Variable):
        return theta.get(term.name, term)
    if isinstance(term, Compound):
        new_args = []
        for a in term.args:
            replaced = substitute_term(a, theta)
            if isinstance(replaced, Compound):
                raise ValueError(
                    f"substitution would nest {replaced.render()} inside {term.render()}"
                )
            new_args.append(replaced)
        return Compound(term.functor, tuple(new_args))
    return term


def substitute_atom(atom: Atom, theta: Substitution) -> Atom:
    return Atom(atom.predicate, tuple(substitute_term(a, theta) for a in atom.args))


def substitute_rule(rule: Rule, theta: Substitution) -> Rule:
    """Replace every occurrence of each mapped variable; others are untouched."""
    head = None if rule.head is None else substitute_atom(rule.head, theta)
    body = tuple(Literal(substitute_atom(l.atom, theta), l.naf) for l in rule.body)
    return Rule(head, body)


def rename_apart(rule: Rule, taken: set[str]) -> Rule:
    """Rename the rule's variables so they do not collide with `taken`."""
    theta: dict[str, Term] = {}
    for name in sorted(rule.variables()):
        if name in taken:
            i = 1
            while f"{name}_{i}" in taken or f"{name}_{i}" in rule.variables():
                i += 1
            theta[name] = Variable(f"{name}_{i}")
    return substitute_rule(rule, theta) if theta else rule


# --- theta-subsumption ----------------------------------------------------------


def _match_term(pattern: Term, target: Term, theta: dict[str, Term]) -> Optional[dict[str, Term]]:
    """One-way matching: variables of `pattern` bind to terms of `target`."""
    if isinstance(pattern, Variable):
        bound = theta.get(pattern.name)
        if bound is None:
            out = dict(theta)
            out[pattern.name] = target
            return out
        return theta if bound == target else None
    if isinstance(pattern, Constant):
        return theta if pattern == target else None
    # compound pattern
    if not isinstance(target, Compound) or pattern.functor != target.functor:
        return None
    if len(pattern.args) != len(target.args):
        return None
    current: Optional[dict[str, Term]] = theta
    for p, t in zip(pattern.args, target.args):
        current = _match_term(p, t, current)
        if current is None:
            return None
    return current


def match_atom(pattern: Atom, target: Atom, theta: Optional[dict[str, Term]] = None) -> Optional[dict[str, Term]]:
    """Extend theta so pattern·theta == target, or return None."""
    if pattern.predicate != target.predicate or pattern.arity != target.arity:
        return None
    current: Optional[dict[str, Term]] = dict(theta or {})
    for p, t in zip(pattern.args, target.args):
        current = _match_term(p, t, current)
        if current is None:
            return None
    return current


def subsumption_substitutions(general: Rule, specific: Rule) -> Iterator[dict[str, Term]]:
    """Yield every substitution theta with head(general)·theta == head(specific)
    and body(general)·theta a subset of body(specific), set-wise."""
    if general.head is None or specific.head is None:
        raise ValueError("theta-subsumption is defined for head-bearing clauses only")
    start = match_atom(general.head, specific.head)
    if start is None:
        return

    body = list(general.body)
    targets = list(specific.body)
    seen: set[tuple[tuple[str, str], ...]] = set()

    def walk(i: int, theta: dict[str, Term]) -> Iterator[dict[str, Term]]:
        if i == len(body):
            key = tuple(sorted((v, t.render()) for v, t in theta.items()))
            if key not in seen:
                seen.add(key)
                yield theta
            return
        lit = body[i]
        for cand in targets:
            if cand.naf != lit.naf:
                continue
            extended = match_atom(lit.atom, cand.atom, theta)
            if extended is not None:
                yield from walk(i + 1, extended)

    yield from walk(0, start)


def theta_subsumes(general: Rule, specific: Rule) -> bool:
    """True iff `general` is at least as general as `specific` in the
    subsumption order (reflexive and transitive)."""
    return next(subsumption_substitutions(general, specific), None) is not None


# --- equality modulo variable renaming ------------------------------------------


def canonical_rule(rule: Rule) -> Rule:
    """Rename variables to V0, V1, ... in order of first appearance, giving a
    representative usable for renaming-insensitive comparison."""
    order: list[str] = []

    def visit(atom: Atom) -> None:
        for a in atom.args:
            if isinstance(a, Variable) and a.name not in order:
                order.append(a.name)
            elif isinstance(a, Compound):
                for x in a.args:
                    if isinstance(x, Variable) and x.name not in order:
                        order.append(x.name)

    if rule.head is not None:
        visit(rule.head)
    for lit in rule.body:
        visit(lit.atom)
    theta = {name: Variable(f"V{i}") for i, name in enumerate(order)}
    return substitute_rule(rule, theta)


def rules_equal_mod_renaming(a: Rule, b: Rule) -> bool:
    ca, cb = canonical_rule(a), canonical_rule(b)
    if ca.head != cb.head:
        return False
    return set(ca.body) == set(cb.body) and len(ca.body) == len(cb.body)


def clause_sets_equal_mod_renaming(xs: Iterable[Rule], ys: Iterable[Rule]) -> bool:
    """Clause-set equality up to variable renaming and clause order."""
    remaining = list(ys)
    for x in xs:
        for i, y in enumerate(remaining):
            if rules_equal_mod_renaming(x, y):
                del remaining[i]
                break
        else:
            return False
    return not remaining


# --- small constructors used throughout ------------------------------------------


def fact(atom: Atom) -> Rule:
    return Rule(atom, ())


def facts_program(atoms: Iterable[Atom]) -> tuple[Rule, ...]:
    return tuple(fact(a) for a in atoms)
