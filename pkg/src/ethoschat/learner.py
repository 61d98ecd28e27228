"""Incremental rule learning from labeled scenario windows.

Each window is one scenario: a set of ground context facts plus conclusions
labeled positive or negative. The learner maintains

  * a clause set (the readable hypothesis, inside the mode language), and
  * a kernel pool: ground, most-specific clauses built from windows whose
    positive conclusions the running hypothesis missed.

Kernels are the learner's memory. They license sound revision without
revisiting raw windows, and — because they are ground — they also keep their
own window covered while the learner waits for enough evidence to commit a
general clause. The effective program of a hypothesis is therefore its clauses
plus its pool.

Revision policy, in order, when a window arrives:

  1. Negative conclusion derived (false positive): the offending clause is
     specialized by conjoining literals drawn from the variabilized bodies of
     the kernels it subsumes. The fewest literals win; if no single refinement
     keeps all subsumed kernels, the clause splits into refinements that
     partition them. No refinement at all quarantines the window.
  2. Positive conclusion missed (false negative): a kernel is built and pooled.
     A new clause is committed only when the minimal consistent generalization
     of that kernel is unique; with competing minimal candidates the learner
     waits (support-grow) rather than guess — the ground kernel keeps the
     window covered in the meantime.
  3. Pending kernels are re-tried on every later window: new negatives shrink
     the candidate set until one minimal clause remains and gets committed.
  4. A clause confirmed by a new positive it already covers absorbs any
     support-kernel literals the new window also satisfies, provided every
     previously covered positive stays covered. The clause drifts toward its
     evidence instead of staying at the most general point that happened to
     work — a deliberately conservative posture for an ethics engine.

After every accepted window the hypothesis has zero false positives and zero
false negatives on everything seen so far; `process_window` re-verifies this
before returning.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .errors import (
    DuplicateWindowError,
    InconsistentProgramError,
    QuarantineError,
    UnsafeRuleError,
)
from .logic import (
    Atom,
    Literal,
    Program,
    Rule,
    Term,
    Variable,
    facts_program,
    rules_equal_mod_renaming,
    subsumption_substitutions,
    theta_subsumes,
)
from .modes import (
    ModeDeclaration,
    body_declarations,
    body_predicate_order,
    head_declarations,
    matching_declaration,
    mode_language_errors,
)
from .solver import answer_sets

logger = logging.getLogger(__name__)

REVISION_ACTIONS = (
    "initialize",
    "split",
    "add-clause",
    "specialize",
    "support-grow",
    "unchanged",
)


# --- domain types ---------------------------------------------------------------


@dataclass(frozen=True)
class Conclusion:
    atom: Atom
    positive: bool

    def render(self) -> str:
        sign = "+" if self.positive else "-"
        return f"{sign}{self.atom.render()}"


@dataclass(frozen=True)
class ExampleWindow:
    """One training scenario: ordered ground context facts plus labeled
    conclusions. No conclusion atom may carry both polarities."""

    id: str
    facts: tuple[Atom, ...]
    conclusions: tuple[Conclusion, ...]

    def __post_init__(self):
        for a in self.facts:
            if not a.is_ground():
                raise ValueError(f"window {self.id}: non-ground fact {a.render()}")
        seen: dict[Atom, bool] = {}
        for c in self.conclusions:
            if not c.atom.is_ground():
                raise ValueError(
                    f"window {self.id}: non-ground conclusion {c.atom.render()}"
                )
            if c.atom in seen and seen[c.atom] != c.positive:
                raise ValueError(
                    f"window {self.id}: {c.atom.render()} labeled both ways"
                )
            seen[c.atom] = c.positive
        self._lint()

    def _lint(self) -> None:
        # Explicit complements (p and not_p) for the same entity in one window
        # usually indicate a transcription slip.
        rendered = {a.render().lower() for a in self.facts}
        for a in self.facts:
            if a.predicate.startswith("not_"):
                bare = a.predicate[4:]
                twin = Atom(bare[0].lower() + bare[1:], a.args) if bare else None
            else:
                twin = Atom("not_" + a.predicate, a.args)
            if twin is not None and twin.render().lower() in rendered:
                logger.warning(
                    "window %s states both %s and its complement", self.id, a.render()
                )

    def positives(self) -> list[Atom]:
        return [c.atom for c in self.conclusions if c.positive]

    def negatives(self) -> list[Atom]:
        return [c.atom for c in self.conclusions if not c.positive]

    def to_payload(self) -> dict:
        return {
            "id": self.id,
            "facts": [a.render() for a in self.facts],
            "conclusions": [
                {"atom": c.atom.render(), "polarity": "positive" if c.positive else "negative"}
                for c in self.conclusions
            ],
        }

    @classmethod
    def from_payload(
        cls, payload: dict, head_predicates: Optional[Iterable[str]] = None
    ) -> "ExampleWindow":
        """Accepts conclusions either as {"atom", "polarity"} objects or as
        plain strings, where a `not_<head>` predicate marks a negative."""
        from .parser import parse_atom

        heads = set(head_predicates or ())
        conclusions: list[Conclusion] = []
        for entry in payload["conclusions"]:
            if isinstance(entry, dict):
                conclusions.append(
                    Conclusion(parse_atom(entry["atom"]), entry["polarity"] == "positive")
                )
                continue
            atom = parse_atom(entry)
            if atom.predicate.startswith("not_") and atom.predicate[4:] in heads:
                conclusions.append(Conclusion(Atom(atom.predicate[4:], atom.args), False))
            else:
                conclusions.append(Conclusion(atom, True))
        return cls(
            id=payload["id"],
            facts=tuple(parse_atom(f) for f in payload["facts"]),
            conclusions=tuple(conclusions),
        )


@dataclass(frozen=True)
class KernelClause:
    """Ground most-specific clause explaining one positive conclusion: the
    conclusion as head, the window's scheme-matching facts as body."""

    head: Atom
    body: tuple[Atom, ...]
    window_id: str

    def as_rule(self) -> Rule:
        return Rule(self.head, tuple(Literal(a) for a in self.body))

    def render(self) -> str:
        return self.as_rule().render()

    def to_payload(self) -> dict:
        return {
            "window": self.window_id,
            "head": self.head.render(),
            "body": [a.render() for a in self.body],
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "KernelClause":
        from .parser import parse_atom

        return cls(
            head=parse_atom(payload["head"]),
            body=tuple(parse_atom(a) for a in payload["body"]),
            window_id=payload["window"],
        )


@dataclass(frozen=True)
class HypothesisClause:
    rule: Rule
    support: tuple[KernelClause, ...]  # every pool kernel this clause subsumes

    def render(self) -> str:
        return self.rule.render()


@dataclass(frozen=True)
class RevisionEntry:
    window_id: str
    action: str
    before: tuple[str, ...]
    after: tuple[str, ...]
    note: str = ""

    def __post_init__(self):
        if self.action not in REVISION_ACTIONS:
            raise ValueError(f"unknown revision action: {self.action}")

    def to_payload(self) -> dict:
        return {
            "window": self.window_id,
            "action": self.action,
            "before": list(self.before),
            "after": list(self.after),
            "note": self.note,
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "RevisionEntry":
        return cls(
            window_id=payload["window"],
            action=payload["action"],
            before=tuple(payload["before"]),
            after=tuple(payload["after"]),
            note=payload.get("note", ""),
        )


@dataclass(frozen=True)
class Hypothesis:
    clauses: tuple[HypothesisClause, ...]
    pool: tuple[KernelClause, ...]
    revision_log: tuple[RevisionEntry, ...] = ()

    @classmethod
    def empty(cls) -> "Hypothesis":
        return cls((), (), ())

    @classmethod
    def build(
        cls,
        clause_rules: Sequence[Rule],
        pool: Sequence[KernelClause],
        revision_log: Sequence[RevisionEntry],
    ) -> "Hypothesis":
        clauses = tuple(
            HypothesisClause(
                rule,
                tuple(k for k in pool if theta_subsumes(rule, k.as_rule())),
            )
            for rule in clause_rules
        )
        for i, a in enumerate(clauses):
            for j, b in enumerate(clauses):
                if i != j and theta_subsumes(a.rule, b.rule):
                    raise ValueError(
                        f"redundant hypothesis: {a.render()} subsumes {b.render()}"
                    )
        return cls(clauses, tuple(pool), tuple(revision_log))

    @property
    def version(self) -> int:
        return len(self.revision_log)

    def clause_rules(self) -> tuple[Rule, ...]:
        return tuple(c.rule for c in self.clauses)

    def program_rules(self) -> tuple[Rule, ...]:
        """What the hypothesis contributes to reasoning: its clauses plus the
        pooled ground kernels (they keep not-yet-generalized windows covered)."""
        return self.clause_rules() + tuple(k.as_rule() for k in self.pool)

    def pending_kernels(self) -> tuple[KernelClause, ...]:
        covered = {id(k) for c in self.clauses for k in c.support}
        return tuple(k for k in self.pool if id(k) not in covered)

    def render(self) -> str:
        return "\n".join(c.render() for c in self.clauses)

    def to_payload(self) -> dict:
        return {
            "clauses": [c.rule.render() for c in self.clauses],
            "pool": [k.to_payload() for k in self.pool],
            "revision_log": [e.to_payload() for e in self.revision_log],
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "Hypothesis":
        from .parser import parse_rule

        pool = tuple(KernelClause.from_payload(k) for k in payload["pool"])
        rules = [parse_rule(text) for text in payload["clauses"]]
        log = tuple(RevisionEntry.from_payload(e) for e in payload["revision_log"])
        return cls.build(rules, pool, log)


@dataclass(frozen=True)
class CoverageReport:
    true_positives: tuple[tuple[str, Atom], ...]
    false_positives: tuple[tuple[str, Atom], ...]
    false_negatives: tuple[tuple[str, Atom], ...]

    @property
    def ok(self) -> bool:
        return not self.false_positives and not self.false_negatives


@dataclass(frozen=True)
class LearnResult:
    hypothesis: Hypothesis
    quarantined: tuple[tuple[str, str], ...]  # (window id, reason)


# --- entailment helpers -----------------------------------------------------------


def _program(background: Program, window: ExampleWindow, extra: Iterable[Rule]) -> Program:
    return Program(tuple(background.rules) + facts_program(window.facts) + tuple(extra))


def _entailed_set(
    background: Program, window: ExampleWindow, extra: Iterable[Rule], atoms: Iterable[Atom]
) -> set[Atom]:
    """Which of `atoms` are cautiously entailed by background + facts + extra."""
    models = answer_sets(_program(background, window, extra))
    if not models:
        raise InconsistentProgramError(
            f"no answer set for window {window.id}; knowledge base is inconsistent"
        )
    return {a for a in atoms if all(a in m for m in models)}


def _clause_fires(background: Program, window: ExampleWindow, rule: Rule, atom: Atom) -> bool:
    return atom in _entailed_set(background, window, [rule], [atom])


def coverage(
    hypothesis: Hypothesis, windows: Iterable[ExampleWindow], background: Program
) -> CoverageReport:
    """Classify every labeled conclusion against the hypothesis's effective
    program. Positive and entailed -> true positive; positive and missed ->
    false negative; negative and entailed -> false positive."""
    extra = hypothesis.program_rules()
    tps: list[tuple[str, Atom]] = []
    fps: list[tuple[str, Atom]] = []
    fns: list[tuple[str, Atom]] = []
    for window in windows:
        wanted = [c.atom for c in window.conclusions]
        entailed = _entailed_set(background, window, extra, wanted)
        for c in window.conclusions:
            if c.positive:
                (tps if c.atom in entailed else fns).append((window.id, c.atom))
            elif c.atom in entailed:
                fps.append((window.id, c.atom))
    return CoverageReport(tuple(tps), tuple(fps), tuple(fns))


# --- kernel construction -----------------------------------------------------------


def build_kernel(
    window: ExampleWindow, conclusion: Atom, modes: Sequence[ModeDeclaration]
) -> Optional[KernelClause]:
    """Most-specific clause for one positive conclusion: body = the window's
    facts that instantiate some modeb scheme, each scheme used at most its
    recall, earliest facts kept. Returns None when no modeh scheme matches."""
    if matching_declaration(conclusion, head_declarations(modes)) is None:
        logger.warning(
            "window %s: conclusion %s matches no modeh scheme; cannot be learned",
            window.id,
            conclusion.render(),
        )
        return None
    used: dict[int, int] = {}
    body: list[Atom] = []
    decls = body_declarations(modes)
    for fact_atom in window.facts:
        for i, decl in enumerate(decls):
            if not decl.matches(fact_atom):
                continue
            if decl.recall is not None and used.get(i, 0) >= decl.recall:
                continue
            used[i] = used.get(i, 0) + 1
            body.append(fact_atom)
            break
    return KernelClause(conclusion, tuple(body), window.id)


def build_kernel_set(
    window: ExampleWindow,
    background: Program,
    modes: Sequence[ModeDeclaration],
    hypothesis: Optional[Hypothesis] = None,
) -> list[KernelClause]:
    """Kernels for every positive conclusion the current knowledge misses."""
    extra = hypothesis.program_rules() if hypothesis is not None else ()
    entailed = _entailed_set(background, window, extra, window.positives())
    kernels = []
    for atom in window.positives():
        if atom in entailed:
            continue
        kernel = build_kernel(window, atom, modes)
        if kernel is not None:
            kernels.append(kernel)
    return kernels


def variabilize(kernel: KernelClause, modes: Sequence[ModeDeclaration]) -> Rule:
    """Replace ground terms at +/- placemarker positions with variables, the
    same term becoming the same variable throughout; `#` positions keep their
    terms. Variables are named V, X1, X2, ... by first appearance.

    A term occurring only in the head is left ground so the result is always a
    safe rule (its variables all occur in positive body literals)."""
    head_decl = matching_declaration(kernel.head, head_declarations(modes))
    body_decls = [
        matching_declaration(a, body_declarations(modes)) for a in kernel.body
    ]

    variable_positions: list[tuple[Atom, ModeDeclaration]] = []
    if head_decl is not None:
        variable_positions.append((kernel.head, head_decl))
    for atom, decl in zip(kernel.body, body_decls):
        if decl is not None:
            variable_positions.append((atom, decl))

    in_body: set[str] = set()
    for atom, decl in zip(kernel.body, body_decls):
        if decl is None:
            continue
        for term, marker in zip(atom.args, decl.placemarkers):
            if marker.mark in "+-":
                in_body.add(term.render())

    mapping: dict[str, Variable] = {}

    def name_for(term: Term) -> Variable:
        key = term.render()
        if key not in mapping:
            mapping[key] = Variable("V" if not mapping else f"X{len(mapping)}")
        return mapping[key]

    def rewrite(atom: Atom, decl: Optional[ModeDeclaration]) -> Atom:
        if decl is None:
            return atom
        args: list[Term] = []
        for term, marker in zip(atom.args, decl.placemarkers):
            if marker.mark in "+-" and term.render() in in_body:
                args.append(name_for(term))
            else:
                args.append(term)
        return Atom(atom.predicate, tuple(args))

    head = rewrite(kernel.head, head_decl)
    body = tuple(
        Literal(rewrite(atom, decl)) for atom, decl in zip(kernel.body, body_decls)
    )
    return Rule(head, body)


# --- revision search ----------------------------------------------------------------


@dataclass
class _Context:
    background: Program
    modes: Sequence[ModeDeclaration]
    windows: list[ExampleWindow]  # everything seen, current window last
    preference: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if not self.preference:
            self.preference = body_predicate_order(self.modes)

    def literal_key(self, lit: Literal) -> tuple[int, str]:
        return (self.preference.get(lit.atom.predicate, len(self.preference)), lit.render())


def _consistent(rule: Rule, ctx: _Context) -> bool:
    """The clause alone derives no negatively labeled conclusion anywhere."""
    for window in ctx.windows:
        negatives = window.negatives()
        if not negatives:
            continue
        entailed = _entailed_set(ctx.background, window, [rule], negatives)
        if entailed:
            return False
    return True


def _minimal_generalizations(kernel: KernelClause, ctx: _Context) -> list[Rule]:
    """All mode-conformant, consistent clauses of minimal body size obtained by
    keeping a subset of the variabilized kernel's body. Ordered by literal
    preference; deduplicated up to renaming."""
    kvar = variabilize(kernel, ctx.modes)
    if not kvar.variables():
        return []  # nothing to generalize; the ground kernel stays in the pool
    lits = sorted(kvar.body, key=ctx.literal_key)
    found: list[Rule] = []
    for size in range(1, len(lits) + 1):
        for combo in itertools.combinations(lits, size):
            try:
                candidate = Rule(kvar.head, tuple(combo))
            except UnsafeRuleError:
                continue
            if mode_language_errors(candidate, ctx.modes):
                continue
            if not _consistent(candidate, ctx):
                continue
            if not any(rules_equal_mod_renaming(candidate, r) for r in found):
                found.append(candidate)
        if found:
            break
    return found


def _candidate_literals(rule: Rule, kernel: KernelClause, ctx: _Context) -> list[Literal]:
    """Kernel body literals, pulled back through a subsumption substitution,
    that the clause does not contain yet. These are the only literals a sound
    specialization may add: the refined clause keeps subsuming the kernel."""
    out: dict[str, Literal] = {}
    for theta in subsumption_substitutions(rule, kernel.as_rule()):
        reverse: dict[str, Variable] = {}
        for var in sorted(theta):
            key = theta[var].render()
            reverse.setdefault(key, Variable(var))
        for atom in kernel.body:
            args = tuple(reverse.get(t.render(), t) for t in atom.args)
            lit = Literal(Atom(atom.predicate, args))
            if lit in rule.body:
                continue
            out.setdefault(lit.render(), lit)
    return sorted(out.values(), key=ctx.literal_key)


def _eliminates(rule: Rule, fps: Sequence[tuple[str, Atom]], ctx: _Context) -> bool:
    by_window = {w.id: w for w in ctx.windows}
    for window_id, atom in fps:
        if _clause_fires(ctx.background, by_window[window_id], rule, atom):
            return False
    return True


def specialize(
    rule: Rule,
    support: Sequence[KernelClause],
    fps: Sequence[tuple[str, Atom]],
    ctx: _Context,
) -> list[Rule]:
    """Refine an offending clause by conjoining support-kernel literals.

    Prefers a single refinement (fewest added literals) that removes every
    given false positive while subsuming the whole support set; otherwise the
    clause splits into per-kernel refinements. Raises QuarantineError when not
    even a split can reconcile the support with the false positives.
    """
    if not fps:
        raise ValueError("specialize needs at least one false positive")
    window_id = fps[0][0]

    if support:
        merged: dict[str, Literal] = {}
        for kernel in support:
            for lit in _candidate_literals(rule, kernel, ctx):
                merged.setdefault(lit.render(), lit)
        pool = sorted(merged.values(), key=ctx.literal_key)

        for size in range(1, len(pool) + 1):
            for combo in itertools.combinations(pool, size):
                refined = Rule(rule.head, rule.body + tuple(combo))
                if mode_language_errors(refined, ctx.modes):
                    continue
                if not all(theta_subsumes(refined, k.as_rule()) for k in support):
                    continue
                if _eliminates(refined, fps, ctx):
                    return [refined]

        # No single refinement keeps the whole support set: split it.
        split: list[Rule] = []
        resolved = 0
        for kernel in support:
            cands = _candidate_literals(rule, kernel, ctx)
            best: Optional[Rule] = None
            for size in range(1, len(cands) + 1):
                for combo in itertools.combinations(cands, size):
                    refined = Rule(rule.head, rule.body + tuple(combo))
                    if mode_language_errors(refined, ctx.modes):
                        continue
                    if not theta_subsumes(refined, kernel.as_rule()):
                        continue
                    if _eliminates(refined, fps, ctx):
                        best = refined
                        break
                if best is not None:
                    break
            if best is None:
                continue
            resolved += 1
            if not any(rules_equal_mod_renaming(best, r) for r in split):
                split.append(best)
        if resolved:
            return split

    raise QuarantineError(
        window_id,
        f"no refinement of '{rule.render()}' removes its false positives "
        f"within the support set",
    )


# --- the incremental step --------------------------------------------------------------


_TAG_PRECEDENCE = ("initialize", "split", "add-clause", "specialize", "support-grow")


def process_window(
    state: Hypothesis,
    window: ExampleWindow,
    background: Program,
    modes: Sequence[ModeDeclaration],
    memory: Sequence[ExampleWindow],
) -> Hypothesis:
    """One incremental step. Returns the revised hypothesis; raises
    DuplicateWindowError or QuarantineError (leaving `state` untouched —
    everything here is persistent data, so the caller keeps the old value)."""
    if any(w.id == window.id for w in memory):
        raise DuplicateWindowError(window.id)

    ctx = _Context(background, modes, list(memory) + [window])
    clauses: list[Rule] = list(state.clause_rules())
    pool: list[KernelClause] = list(state.pool)
    before = tuple(r.render() for r in clauses)
    tags: list[str] = []
    notes: list[str] = []
    was_empty = not clauses

    def pool_rules() -> list[Rule]:
        return [k.as_rule() for k in pool]

    def window_report(w: ExampleWindow) -> tuple[list[Atom], list[Atom]]:
        wanted = [c.atom for c in w.conclusions]
        entailed = _entailed_set(background, w, clauses + pool_rules(), wanted)
        fns = [c.atom for c in w.conclusions if c.positive and c.atom not in entailed]
        fps = [c.atom for c in w.conclusions if not c.positive and c.atom in entailed]
        return fns, fps

    # 1. Specialize away false positives introduced by the new window.
    _, fps_here = window_report(window)
    if fps_here:
        fp_pairs = [(window.id, atom) for atom in fps_here]
        offender_found = False
        idx = 0
        while idx < len(clauses):
            rule = clauses[idx]
            mine = [
                (wid, atom)
                for wid, atom in fp_pairs
                if _clause_fires(background, window, rule, atom)
            ]
            if not mine:
                idx += 1
                continue
            offender_found = True
            support = [k for k in pool if theta_subsumes(rule, k.as_rule())]
            refined = specialize(rule, support, mine, ctx)
            clauses[idx : idx + 1] = refined
            tags.append("split" if len(refined) > 1 else "specialize")
            notes.append(
                f"{rule.render()} -> " + " | ".join(r.render() for r in refined)
            )
            idx += len(refined)
        if not offender_found:
            # Derived by the background theory or by a stored kernel: the new
            # label contradicts knowledge the learner is not allowed to touch.
            raise QuarantineError(
                window.id,
                f"negative conclusion {fps_here[0].render()} follows from the "
                f"background knowledge or stored evidence",
            )

    # 2. Build kernels for missed positives; commit only unambiguous clauses.
    attempted: set[str] = set()

    def try_commit(kernel: KernelClause, fresh: bool) -> None:
        attempted.add(kernel.render())
        generalizations = _minimal_generalizations(kernel, ctx)
        if len(generalizations) == 1:
            committed = generalizations[0]
            if any(rules_equal_mod_renaming(committed, r) for r in clauses):
                tags.append("support-grow")
                return
            clauses.append(committed)
            if was_empty and len(clauses) == 1:
                tags.append("initialize")
            elif any(
                r.head is not None
                and committed.head is not None
                and r.head.predicate == committed.head.predicate
                for r in clauses[:-1]
            ):
                tags.append("split" if not fresh else "add-clause")
            else:
                tags.append("add-clause")
            notes.append(f"committed {committed.render()} for {kernel.window_id}")
        else:
            tags.append("support-grow")
            if len(generalizations) > 1:
                notes.append(
                    f"{len(generalizations)} minimal generalizations of "
                    f"{kernel.window_id}'s kernel; waiting for evidence"
                )
            else:
                notes.append(
                    f"kernel of {kernel.window_id} admits no general clause yet"
                )

    fns_here, _ = window_report(window)
    for atom in fns_here:
        kernel = build_kernel(window, atom, modes)
        if kernel is None:
            raise QuarantineError(
                window.id,
                f"positive conclusion {atom.render()} matches no modeh scheme",
            )
        pool.append(kernel)
        try_commit(kernel, fresh=True)

    # 3. Revisit pending kernels: new evidence may have broken their ties.
    for kernel in list(pool):
        if kernel.render() in attempted:
            continue
        if any(theta_subsumes(r, kernel.as_rule()) for r in clauses):
            continue
        try_commit(kernel, fresh=False)

    # 4. Drop clauses another clause subsumes (the general one wins; between
    # renaming-equal clauses the earlier stays).
    cleaned: list[Rule] = []
    for rule in clauses:
        if any(theta_subsumes(kept, rule) for kept in cleaned):
            continue
        cleaned = [kept for kept in cleaned if not theta_subsumes(rule, kept)]
        cleaned.append(rule)
    clauses = cleaned

    # 5. Evidence absorption: a pre-existing clause confirmed by a new positive
    # takes on support literals the new window also satisfies, as long as every
    # positive it used to cover stays covered.
    positives_here = window.positives()
    if positives_here:
        for idx, rule in enumerate(clauses):
            if rule.render() not in before:
                continue  # created or refined this window; already in sync
            if not any(
                _clause_fires(background, window, rule, atom) for atom in positives_here
            ):
                continue
            support = [k for k in pool if theta_subsumes(rule, k.as_rule())]
            covered_before = [
                (w, atom)
                for w in ctx.windows
                for atom in w.positives()
                if _clause_fires(background, w, rule, atom)
            ]
            current = rule
            for kernel in support:
                absorbing = True
                while absorbing:
                    absorbing = False
                    for lit in _candidate_literals(current, kernel, ctx):
                        tightened = Rule(current.head, current.body + (lit,))
                        if mode_language_errors(tightened, ctx.modes):
                            continue
                        if all(
                            _clause_fires(background, w, tightened, atom)
                            for w, atom in covered_before
                        ):
                            current = tightened
                            absorbing = True
                            break
            if current is not rule:
                if any(
                    theta_subsumes(other, current) or theta_subsumes(current, other)
                    for j, other in enumerate(clauses)
                    if j != idx
                ):
                    continue  # absorption would make this clause redundant
                notes.append(f"{rule.render()} -> {current.render()}")
                clauses[idx] = current
                tags.append("specialize")

    # 6. Full-memory verification; late kernels for positives a revision exposed.
    for _ in range(sum(len(w.positives()) for w in ctx.windows) + 1):
        all_fns: list[tuple[ExampleWindow, Atom]] = []
        for w in ctx.windows:
            fns, fps = window_report(w)
            if fps:
                raise QuarantineError(
                    window.id,
                    f"revision left a false positive {fps[0].render()} on {w.id}",
                )
            all_fns.extend((w, atom) for atom in fns)
        if not all_fns:
            break
        for w, atom in all_fns:
            kernel = build_kernel(w, atom, modes)
            if kernel is None or kernel.render() in {k.render() for k in pool}:
                raise QuarantineError(
                    window.id, f"cannot restore coverage of {atom.render()} on {w.id}"
                )
            pool.append(kernel)
            try_commit(kernel, fresh=False)
    else:
        raise QuarantineError(window.id, "full-memory verification did not converge")

    action = next((t for t in _TAG_PRECEDENCE if t in tags), "unchanged")
    entry = RevisionEntry(
        window_id=window.id,
        action=action,
        before=before,
        after=tuple(r.render() for r in clauses),
        note="; ".join(notes),
    )
    return Hypothesis.build(clauses, pool, state.revision_log + (entry,))


def learn_stream(
    windows: Sequence[ExampleWindow],
    background: Program,
    modes: Sequence[ModeDeclaration],
) -> LearnResult:
    """Fold process_window over an ordered stream. Quarantined windows are
    skipped and reported; duplicate ids are an error, not a quarantine."""
    state = Hypothesis.empty()
    seen: list[ExampleWindow] = []
    quarantined: list[tuple[str, str]] = []
    for window in windows:
        try:
            state = process_window(state, window, background, modes, seen)
        except QuarantineError as err:
            quarantined.append((window.id, err.reason))
            logger.warning("quarantined %s: %s", window.id, err.reason)
            continue
        seen.append(window)
    return LearnResult(state, tuple(quarantined))
