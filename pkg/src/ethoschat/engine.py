"""Training-phase and test-phase conversation logic.

Free-text understanding is out of scope: a scenario arrives as structured
fields — the product asked about, the response handle, annotation predicates
describing the response, and (in training) an ethical/unethical label:

    {"request": {"product": "productx"},
     "response": {"handle": "healthy-way-to-loose-wieght"},
     "annotations": ["not_SupportEvidence"],
     "label": "unethical"}

The engine turns a scenario into ground facts, asks the solver for a verdict
with a derivation, and, in training, feeds the labeled window to the learner
and persists both the window and the revised hypothesis. A failed training
step persists nothing.

Annotation predicates come from a closed vocabulary: the mode-declaration body
predicates, the body predicates of the seed background rules, and their
explicit complements (`not_` forms).
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Optional

from .errors import (
    DuplicateRecordError,
    InconsistentProgramError,
    MalformedTurnError,
    NoDerivationError,
    StaleHandleError,
)
from .learner import (
    Conclusion,
    ExampleWindow,
    Hypothesis,
    process_window,
)
from .logic import Atom, Compound, Constant, Program, facts_program
from .modes import body_declarations, head_declarations
from .solver import Derivation, answer_sets, explain, ground
from .store import JournalStore


# --- structured turns ---------------------------------------------------------


@dataclass(frozen=True)
class Turn:
    role: str  # customer | agent | trainer
    kind: str  # request | response | annotation | label
    content: dict

    def __post_init__(self):
        if self.role not in ("customer", "agent", "trainer"):
            raise MalformedTurnError(f"unknown role: {self.role}")
        if self.kind not in ("request", "response", "annotation", "label"):
            raise MalformedTurnError(f"unknown turn kind: {self.kind}")


@dataclass
class Session:
    id: str
    phase: str  # training | test
    turns: list[Turn] = field(default_factory=list)
    derived_window: Optional[ExampleWindow] = None

    def add(self, turn: Turn) -> None:
        if turn.kind == "label":
            if not any(t.kind == "response" for t in self.turns):
                raise MalformedTurnError("a label must follow a response turn")
        self.turns.append(turn)


@dataclass(frozen=True)
class Scenario:
    """One complete structured exchange: request, response, annotations, and
    (for training) a label."""

    product: str
    handle: str
    annotations: tuple[str, ...]
    label: Optional[str] = None
    id: Optional[str] = None

    @classmethod
    def from_json(cls, body: dict, require_label: bool = False) -> "Scenario":
        if not isinstance(body, dict):
            raise MalformedTurnError("scenario must be a JSON object")
        request = body.get("request")
        response = body.get("response")
        if not isinstance(request, dict) or "product" not in request:
            raise MalformedTurnError("missing request.product")
        if not isinstance(response, dict) or "handle" not in response:
            raise MalformedTurnError("missing response.handle")
        annotations = body.get("annotations", [])
        if not isinstance(annotations, list) or not all(
            isinstance(a, str) for a in annotations
        ):
            raise MalformedTurnError("annotations must be a list of predicate names")
        label = body.get("label")
        if require_label and label not in ("ethical", "unethical"):
            raise MalformedTurnError("label must be 'ethical' or 'unethical'")
        if label is not None and label not in ("ethical", "unethical"):
            raise MalformedTurnError(f"unknown label: {label}")
        return cls(
            product=str(request["product"]),
            handle=str(response["handle"]),
            annotations=tuple(annotations),
            label=label,
            id=body.get("id"),
        )


@dataclass(frozen=True)
class FiredRule:
    rule: str
    substitution: dict[str, str]

    def to_dict(self) -> dict:
        return {"rule": self.rule, "substitution": dict(self.substitution)}


@dataclass(frozen=True)
class Verdict:
    status: str  # ethical | unethical | unknown
    fired_rules: tuple[FiredRule, ...]
    derivation: Optional[Derivation]
    hypothesis_version: int
    contested: bool = False  # brave and cautious entailment disagree
    note: str = ""

    def to_dict(self) -> dict:
        out = {
            "status": self.status,
            "firedRules": [f.to_dict() for f in self.fired_rules],
            "hypothesisVersion": self.hypothesis_version,
            "contested": self.contested,
        }
        if self.derivation is not None:
            out["derivation"] = self.derivation.to_dict()
        if self.note:
            out["note"] = self.note
        return out


@dataclass(frozen=True)
class TrainingStep:
    verdict_before: Verdict
    window_id: str
    action: str
    before: tuple[str, ...]
    after: tuple[str, ...]
    note: str
    hypothesis_version: int

    def to_dict(self) -> dict:
        return {
            "window": self.window_id,
            "action": self.action,
            "before": list(self.before),
            "after": list(self.after),
            "note": self.note,
            "hypothesisVersion": self.hypothesis_version,
            "verdictBefore": self.verdict_before.to_dict(),
        }


def complement_name(predicate: str) -> str:
    """Explicit complement of an annotation predicate: spreadFalseBelief <->
    not_spreadFalseBelief, not_SupportEvidence <-> supportEvidence."""
    if predicate.startswith("not_"):
        bare = predicate[4:]
        return bare[0].lower() + bare[1:] if bare else bare
    return "not_" + predicate


class DialogueEngine:
    """Single knowledge base: one store, one hypothesis, one writer.

    Evaluations read a consistent snapshot and may run concurrently; training
    steps serialize on an internal lock.
    """

    def __init__(self, store: JournalStore):
        self.store = store
        self._lock = threading.Lock()
        state = store.load_state()
        self.background = state.background
        self.background_text = state.background_text
        self.modes = list(state.modes)
        self.windows: list[ExampleWindow] = list(state.windows)
        self.hypothesis: Hypothesis = state.hypothesis
        self.hypothesis_version = state.hypothesis_version
        self._catch_up()

    def seed(self, background_text: str, modes_text: str) -> None:
        """Install seed knowledge into an empty store."""
        if not self.store.is_empty:
            raise DuplicateRecordError("store already holds records; refusing to seed")
        self.store.set_background(background_text)
        self.store.set_modes(modes_text)
        state = self.store.load_state()
        self.background = state.background
        self.background_text = state.background_text
        self.modes = list(state.modes)

    def _catch_up(self) -> None:
        """A crash between a window append and its snapshot leaves the journal
        with more windows than the hypothesis has processed; replay the tail."""
        done = len(self.hypothesis.revision_log)
        if done >= len(self.windows):
            return
        for window in self.windows[done:]:
            self.hypothesis = process_window(
                self.hypothesis,
                window,
                self.background,
                self.modes,
                self.windows[: len(self.hypothesis.revision_log)],
            )
            self.store.snapshot_hypothesis(self.hypothesis)
            self.hypothesis_version += 1

    # -- vocabulary ------------------------------------------------------------

    def annotation_vocabulary(self) -> list[str]:
        names: dict[str, None] = {}
        for decl in body_declarations(self.modes):
            names.setdefault(decl.predicate, None)
            names.setdefault(complement_name(decl.predicate), None)
        for rule in self.background:
            for lit in rule.body:
                names.setdefault(lit.atom.predicate, None)
                names.setdefault(complement_name(lit.atom.predicate), None)
        names.pop("answer", None)
        names.pop(complement_name("answer"), None)
        return sorted(names)

    def head_predicate(self) -> str:
        heads = head_declarations(self.modes)
        if not heads:
            raise MalformedTurnError("no head scheme declared; cannot label scenarios")
        return heads[0].predicate

    # -- scenario -> facts -------------------------------------------------------

    def scenario_facts(self, scenario: Scenario) -> tuple[Atom, ...]:
        try:
            product = Constant(scenario.product)
            handle = Constant(scenario.handle)
        except ValueError as err:
            raise MalformedTurnError(str(err))
        vocabulary = set(self.annotation_vocabulary())
        facts = [
            Atom("ask", (Constant("customer"), Compound("infoabout", (product,)))),
            Atom("answer", (handle,)),
        ]
        for name in scenario.annotations:
            if name not in vocabulary:
                raise MalformedTurnError(
                    f"annotation {name!r} is outside the known vocabulary"
                )
            facts.append(Atom(name, (handle,)))
        return tuple(facts)

    def ingest_scenario(self, scenario: Scenario) -> ExampleWindow:
        if scenario.label not in ("ethical", "unethical"):
            raise MalformedTurnError("training scenario needs a label")
        if any(
            Atom("answer", (Constant(scenario.handle),)) in w.facts
            for w in self.windows
        ):
            raise StaleHandleError(scenario.handle)
        facts = self.scenario_facts(scenario)
        conclusion = Conclusion(
            Atom(self.head_predicate(), (Constant(scenario.handle),)),
            scenario.label == "unethical",
        )
        window_id = scenario.id or f"w{len(self.windows) + 1}"
        return ExampleWindow(window_id, facts, (conclusion,))

    # -- test phase ---------------------------------------------------------------

    def evaluate_response(self, scenario: Scenario) -> Verdict:
        facts = self.scenario_facts(scenario)
        query = Atom(self.head_predicate(), (Constant(scenario.handle),))
        program = Program(
            tuple(self.background.rules)
            + self.hypothesis.program_rules()
            + facts_program(facts)
        )
        models = answer_sets(program)
        if not models:
            return Verdict(
                status="unknown",
                fired_rules=(),
                derivation=None,
                hypothesis_version=self.hypothesis_version,
                note="knowledge base admits no answer set for this scenario",
            )
        cautious = all(query in m for m in models)
        brave = any(query in m for m in models)
        if not cautious:
            return Verdict(
                status="ethical",
                fired_rules=(),
                derivation=None,
                hypothesis_version=self.hypothesis_version,
                contested=brave,
            )
        witness = models[0]
        fired: list[FiredRule] = []
        seen: set[str] = set()
        for gr in ground(program).rules:
            if gr.rule.head != query or not gr.rule.body:
                continue
            satisfied = all(
                (lit.atom not in witness.atoms) if lit.naf else (lit.atom in witness.atoms)
                for lit in gr.rule.body
            )
            if satisfied and gr.origin.render() not in seen:
                seen.add(gr.origin.render())
                fired.append(
                    FiredRule(
                        gr.origin.render(),
                        {v: t.render() for v, t in gr.theta},
                    )
                )
        derivation = explain(program, query, witness)
        return Verdict(
            status="unethical",
            fired_rules=tuple(fired),
            derivation=derivation,
            hypothesis_version=self.hypothesis_version,
            contested=not brave or not cautious,
        )

    # -- training phase --------------------------------------------------------------

    def run_training_step(self, scenario: Scenario) -> TrainingStep:
        with self._lock:
            verdict = self.evaluate_response(scenario)
            window = self.ingest_scenario(scenario)
            revised = process_window(
                self.hypothesis, window, self.background, self.modes, self.windows
            )
            # Nothing was persisted above; the learner either returned or threw.
            self.store.append_window(window)
            self.store.snapshot_hypothesis(revised)
            self.windows.append(window)
            self.hypothesis = revised
            self.hypothesis_version += 1
            entry = revised.revision_log[-1]
            return TrainingStep(
                verdict_before=verdict,
                window_id=window.id,
                action=entry.action,
                before=entry.before,
                after=entry.after,
                note=entry.note,
                hypothesis_version=self.hypothesis_version,
            )

    # -- inspection --------------------------------------------------------------------

    def explain_atom(self, atom: Atom) -> Derivation:
        """Derivation of an atom over the whole stored knowledge: background,
        every stored window's facts, and the hypothesis. Raises
        InconsistentProgramError or NoDerivationError accordingly."""
        all_facts: list[Atom] = []
        seen: set[str] = set()
        for window in self.windows:
            for f in window.facts:
                if f.render() not in seen:
                    seen.add(f.render())
                    all_facts.append(f)
        program = Program(
            tuple(self.background.rules)
            + self.hypothesis.program_rules()
            + facts_program(all_facts)
        )
        models = answer_sets(program)
        if not models:
            raise InconsistentProgramError("stored knowledge admits no answer set")
        if not all(atom in m for m in models):
            raise NoDerivationError(f"{atom.render()} is not entailed")
        return explain(program, atom, models[0])
