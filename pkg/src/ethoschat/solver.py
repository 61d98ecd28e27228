"""Grounding and answer-set computation with derivation traces.

The solver is deliberately exhaustive: programs in this engine are desk-scale
(a background theory, one scenario's facts, and a handful of learned clauses),
so we ground fully and test candidate interpretations directly against the
stability condition: S is an answer set iff S equals the least model of the
program's reduct with respect to S and violates no constraint.

Two things keep this fast enough in practice:

  * negation-free ground programs (the common case during learning: facts plus
    definite clauses) have exactly one candidate — the least model — so no
    subset enumeration happens at all;
  * for programs with default negation, candidates range over subsets of the
    atoms that occur in some rule head, since nothing else can ever be derived.

Everything is deterministic: ground rules keep source order, answer sets are
returned sorted by their rendered atoms.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

from .errors import GroundExplosionError, InconsistentProgramError, NoDerivationError
from .logic import (
    Atom,
    Compound,
    Program,
    Rule,
    Term,
    substitute_rule,
)

DEFAULT_GROUND_CAP = 100_000


# --- ground programs -----------------------------------------------------------


@dataclass(frozen=True)
class GroundRule:
    """A variable-free rule instance, remembering where it came from."""

    rule: Rule
    origin: Rule
    theta: tuple[tuple[str, Term], ...]  # sorted (variable, term) pairs

    def render(self) -> str:
        return self.rule.render()


@dataclass(frozen=True)
class GroundProgram:
    rules: tuple[GroundRule, ...]
    herbrand_base: frozenset[Atom]

    def has_naf(self) -> bool:
        return any(lit.naf for gr in self.rules for lit in gr.rule.body)


def _ground_terms_of(program: Program) -> list[Term]:
    """Every ground term occurring in the program, constants and compounds
    alike, in first-appearance order."""
    seen: dict[str, Term] = {}

    def visit_term(term: Term) -> None:
        if term.is_ground() and not isinstance(term, Compound):
            seen.setdefault(term.render(), term)
        elif isinstance(term, Compound):
            if term.is_ground():
                seen.setdefault(term.render(), term)
            for a in term.args:
                visit_term(a)

    for rule in program:
        atoms = ([rule.head] if rule.head else []) + [l.atom for l in rule.body]
        for atom in atoms:
            for arg in atom.args:
                visit_term(arg)
    return list(seen.values())


def ground(program: Program, cap: int = DEFAULT_GROUND_CAP) -> GroundProgram:
    """All ground instances of each rule over the program's ground terms.

    Instances that would nest a compound term inside another are skipped (the
    term language is one level deep). Raises GroundExplosionError before
    enumerating if the instance count estimate exceeds `cap`.
    """
    universe = _ground_terms_of(program)
    estimate = 0
    for rule in program:
        n_vars = len(rule.variables())
        estimate += len(universe) ** n_vars if n_vars else 1
        if estimate > cap:
            raise GroundExplosionError(estimate, cap)

    ground_rules: list[GroundRule] = []
    for rule in program:
        variables = sorted(rule.variables())
        if not variables:
            ground_rules.append(GroundRule(rule, rule, ()))
            continue
        for combo in itertools.product(universe, repeat=len(variables)):
            theta = dict(zip(variables, combo))
            try:
                instance = substitute_rule(rule, theta)
            except ValueError:
                continue  # compound-in-compound binding: not a term of the language
            ground_rules.append(
                GroundRule(instance, rule, tuple(sorted(theta.items())))
            )

    base: set[Atom] = set()
    for gr in ground_rules:
        if gr.rule.head is not None:
            base.add(gr.rule.head)
        for lit in gr.rule.body:
            base.add(lit.atom)
    return GroundProgram(tuple(ground_rules), frozenset(base))


# --- stability ----------------------------------------------------------------


def reduct(gp: GroundProgram, candidate: frozenset[Atom] | set[Atom]) -> GroundProgram:
    """Gelfond–Lifschitz construction: drop every rule blocked by the candidate
    (a naf-literal whose atom the candidate contains), then strip the remaining
    naf-literals. The result is negation-free.

    A constraint whose body was pure negation reduces to nothing and is
    dropped; constraint violation is always checked against the original
    program, never the reduct."""
    kept: list[GroundRule] = []
    for gr in gp.rules:
        blocked = any(lit.naf and lit.atom in candidate for lit in gr.rule.body)
        if blocked:
            continue
        positive = tuple(lit for lit in gr.rule.body if not lit.naf)
        if len(positive) == len(gr.rule.body):
            kept.append(gr)
        elif gr.rule.head is None and not positive:
            continue
        else:
            kept.append(GroundRule(Rule(gr.rule.head, positive), gr.origin, gr.theta))
    return GroundProgram(tuple(kept), gp.herbrand_base)


def least_model(gp: GroundProgram) -> frozenset[Atom]:
    """Least fixpoint of the immediate-consequence operator. The program must
    be negation-free; constraints (headless rules) derive nothing."""
    if gp.has_naf():
        raise ValueError("least_model requires a negation-free program")
    derived: set[Atom] = set()
    pending = [gr.rule for gr in gp.rules if gr.rule.head is not None]
    changed = True
    while changed:
        changed = False
        remaining = []
        for rule in pending:
            if all(lit.atom in derived for lit in rule.body):
                if rule.head not in derived:
                    derived.add(rule.head)
                    changed = True
            else:
                remaining.append(rule)
        pending = remaining
    return frozenset(derived)


def _violated_constraint(gp: GroundProgram, atoms: frozenset[Atom]) -> bool:
    for gr in gp.rules:
        if gr.rule.head is not None:
            continue
        sat = all(
            (lit.atom not in atoms) if lit.naf else (lit.atom in atoms)
            for lit in gr.rule.body
        )
        if sat:
            return True
    return False


@dataclass(frozen=True)
class AnswerSet:
    atoms: frozenset[Atom]

    def __contains__(self, atom: Atom) -> bool:
        return atom in self.atoms

    def sorted_atoms(self) -> list[Atom]:
        return sorted(self.atoms, key=lambda a: a.render())

    def render(self) -> str:
        return " ".join(a.render() for a in self.sorted_atoms())


def _is_stable(gp: GroundProgram, candidate: frozenset[Atom]) -> bool:
    return least_model(reduct(gp, candidate)) == candidate


def answer_sets(
    program: Program,
    limit: Optional[int] = None,
    cap: int = DEFAULT_GROUND_CAP,
) -> list[AnswerSet]:
    """All answer sets of the program, in lexicographic order of their rendered
    atom lists, truncated to `limit` when given."""
    gp = ground(program, cap=cap)

    if not gp.has_naf():
        model = least_model(gp)
        if _violated_constraint(gp, model):
            return []
        assert _is_stable(gp, model)
        return [AnswerSet(model)][: limit if limit is not None else 1]

    head_atoms = sorted(
        {gr.rule.head for gr in gp.rules if gr.rule.head is not None},
        key=lambda a: a.render(),
    )
    found: list[AnswerSet] = []
    for size in range(len(head_atoms) + 1):
        for combo in itertools.combinations(head_atoms, size):
            candidate = frozenset(combo)
            if _is_stable(gp, candidate) and not _violated_constraint(gp, candidate):
                # stability self-check is the candidate test itself here
                found.append(AnswerSet(candidate))
    found.sort(key=lambda s: tuple(a.render() for a in s.sorted_atoms()))
    return found if limit is None else found[:limit]


def entails(
    program: Program,
    query: Atom,
    mode: str = "cautious",
    cap: int = DEFAULT_GROUND_CAP,
) -> bool:
    """Cautious: query holds in every answer set. Brave: in at least one.
    Raises InconsistentProgramError when the program has no answer set."""
    if mode not in ("cautious", "brave"):
        raise ValueError(f"unknown entailment mode: {mode}")
    models = answer_sets(program, cap=cap)
    if not models:
        raise InconsistentProgramError("program has no answer set")
    if mode == "cautious":
        return all(query in m for m in models)
    return any(query in m for m in models)


# --- derivation traces -----------------------------------------------------------


@dataclass(frozen=True)
class Derivation:
    """Why an atom is in an answer set. Inner nodes carry the ground rule that
    fired; leaves are facts or naf-literals absent from the answer set."""

    atom: Atom
    rule: Optional[GroundRule]  # None exactly for naf leaves
    children: tuple["Derivation", ...] = ()
    naf: bool = False

    @property
    def is_fact(self) -> bool:
        return self.rule is not None and not self.rule.rule.body

    def depth(self) -> int:
        if self.naf:
            return 1
        if not self.children:
            return 1
        return 1 + max(c.depth() for c in self.children)

    def to_dict(self) -> dict:
        out: dict = {"atom": self.atom.render()}
        if self.naf:
            out["kind"] = "naf"
            return out
        if self.is_fact:
            out["kind"] = "fact"
            return out
        assert self.rule is not None
        out["kind"] = "rule"
        out["rule"] = self.rule.origin.render()
        out["ground_rule"] = self.rule.render()
        out["substitution"] = {v: t.render() for v, t in self.rule.theta}
        out["children"] = [c.to_dict() for c in self.children]
        return out


def explain(
    program: Program,
    query: Atom,
    answer_set: AnswerSet,
    cap: int = DEFAULT_GROUND_CAP,
) -> Derivation:
    """A derivation tree for `query`, minimal in depth; ties go to the earlier
    rule in program order. Raises NoDerivationError if the atom is not in the
    answer set."""
    if query not in answer_set:
        raise NoDerivationError(f"{query.render()} is not in the answer set")

    gp = ground(program, cap=cap)
    atoms = answer_set.atoms

    # Rules usable in a derivation: head in the answer set, body satisfied.
    usable: dict[Atom, list[GroundRule]] = {}
    for gr in gp.rules:
        head = gr.rule.head
        if head is None or head not in atoms:
            continue
        ok = all(
            (lit.atom not in atoms) if lit.naf else (lit.atom in atoms)
            for lit in gr.rule.body
        )
        if ok:
            usable.setdefault(head, []).append(gr)

    # Minimal derivation depth per atom, by fixpoint.
    depth: dict[Atom, int] = {}
    changed = True
    while changed:
        changed = False
        for atom, rules in usable.items():
            for gr in rules:
                child_depths = []
                feasible = True
                for lit in gr.rule.body:
                    if lit.naf:
                        child_depths.append(1)
                    elif lit.atom in depth:
                        child_depths.append(depth[lit.atom])
                    else:
                        feasible = False
                        break
                if not feasible:
                    continue
                d = 1 + max(child_depths, default=0)
                if atom not in depth or d < depth[atom]:
                    depth[atom] = d
                    changed = True

    if query not in depth:
        # In the answer set but not derivable from usable rules only happens
        # for inconsistent inputs; treat as underivable.
        raise NoDerivationError(f"no derivation found for {query.render()}")

    def build(atom: Atom) -> Derivation:
        best: Optional[GroundRule] = None
        for gr in usable[atom]:  # program order; first rule achieving the depth wins
            child_depths = []
            feasible = True
            for lit in gr.rule.body:
                if lit.naf:
                    child_depths.append(1)
                elif lit.atom in depth:
                    child_depths.append(depth[lit.atom])
                else:
                    feasible = False
                    break
            if feasible and 1 + max(child_depths, default=0) == depth[atom]:
                best = gr
                break
        assert best is not None
        children = []
        for lit in best.rule.body:
            if lit.naf:
                children.append(Derivation(lit.atom, None, (), naf=True))
            else:
                children.append(build(lit.atom))
        return Derivation(atom, best, tuple(children))

    return build(query)
