"""Acceptance gate: one test per primary criterion, at the stated scale and
tolerance. Each prints a single PASS line on success (run with -s or -v to see
them). Oracles here are written from scratch so they stay independent of the
code paths they judge.
"""

from __future__ import annotations

import itertools
import random
import time

from fastapi.testclient import TestClient

from ethoschat.api import create_app
from ethoschat.engine import DialogueEngine, Scenario
from ethoschat.learner import (
    Conclusion,
    ExampleWindow,
    Hypothesis,
    coverage,
    learn_stream,
    process_window,
)
from ethoschat.logic import (
    Atom,
    Constant,
    Literal,
    Program,
    Rule,
    Variable,
    clause_sets_equal_mod_renaming,
    rules_equal_mod_renaming,
    substitute_rule,
    theta_subsumes,
)
from ethoschat.errors import UnsafeRuleError
from ethoschat.parser import parse_atom, parse_rule
from ethoschat.solver import answer_sets, entails
from ethoschat.store import JournalStore
from ethoschat import data_text


def _pass(name: str) -> None:
    print(f"ACCEPTANCE PASS: {name}")


# --- 1. golden six-window replay ---------------------------------------------------


EXPECTED_TRACE = [
    ("w1", "initialize", ["unethical(V) :- answer(V)."], {"w1"}),
    (
        "w2",
        "specialize",
        ["unethical(V) :- answer(V), not_SupportEvidence(V)."],
        {"w1"},
    ),
    (
        "w3",
        "support-grow",
        ["unethical(V) :- answer(V), not_SupportEvidence(V)."],
        {"w1", "w3"},
    ),
    (
        "w4",
        "split",
        [
            "unethical(V) :- answer(V), not_SupportEvidence(V).",
            "unethical(V) :- answer(V), spreadFalseBelief(V).",
        ],
        {"w1", "w3"},
    ),
    (
        "w5",
        "unchanged",
        [
            "unethical(V) :- answer(V), not_SupportEvidence(V).",
            "unethical(V) :- answer(V), spreadFalseBelief(V).",
        ],
        {"w1", "w3"},
    ),
    (
        "w6",
        "specialize",
        [
            "unethical(V) :- answer(V), not_SupportEvidence(V).",
            "unethical(V) :- answer(V), spreadFalseBelief(V), exploitEmotions(V).",
        ],
        {"w1", "w3"},
    ),
]


def test_golden_replay(demo_windows, background, modes):
    started = time.perf_counter()
    state = Hypothesis.empty()
    seen = []
    for window, (wid, action, clauses, pool_ids) in zip(demo_windows, EXPECTED_TRACE):
        state = process_window(state, window, background, modes, seen)
        seen.append(window)
        entry = state.revision_log[-1]
        assert entry.window_id == wid
        assert entry.action == action, f"{wid}: {entry.action} != {action}"
        assert clause_sets_equal_mod_renaming(
            state.clause_rules(), [parse_rule(c) for c in clauses]
        ), f"{wid}: clauses diverge: {[r.render() for r in state.clause_rules()]}"
        assert {k.window_id for k in state.pool} == pool_ids
    elapsed = time.perf_counter() - started

    # final support sets: the first clause carries w1's kernel, the second w3's
    supports = {
        tuple(sorted(k.window_id for k in c.support)) for c in state.clauses
    }
    assert supports == {("w1",), ("w3",)}
    assert elapsed < 1.0, f"replay took {elapsed:.3f}s"
    _pass(f"golden six-window replay ({elapsed * 1000:.0f} ms)")


# --- 2. solver vs brute-force oracle -----------------------------------------------


def _oracle_models(program: Program) -> list[frozenset[Atom]]:
    """Ground over constants, then test every subset of the full Herbrand base
    for Gelfond–Lifschitz stability. Written independently of the solver."""
    constants = sorted(
        {
            t.name
            for r in program
            for a in ([r.head] if r.head else []) + [l.atom for l in r.body]
            for t in a.args
            if isinstance(t, Constant)
        }
    )
    ground_rules: list[Rule] = []
    for r in program:
        variables = sorted(r.variables())
        if not variables:
            ground_rules.append(r)
            continue
        for combo in itertools.product(constants, repeat=len(variables)):
            theta = {v: Constant(c) for v, c in zip(variables, combo)}
            ground_rules.append(substitute_rule(r, theta))
    base = sorted(
        {
            a
            for r in ground_rules
            for a in ([r.head] if r.head else []) + [l.atom for l in r.body]
        },
        key=lambda a: a.render(),
    )
    models = []
    for size in range(len(base) + 1):
        for combo in itertools.combinations(base, size):
            s = frozenset(combo)
            lm: set[Atom] = set()
            while True:
                grew = False
                for r in ground_rules:
                    if r.head is None or r.head in lm:
                        continue
                    if any(l.naf and l.atom in s for l in r.body):
                        continue
                    if all(l.atom in lm for l in r.body if not l.naf):
                        lm.add(r.head)
                        grew = True
                if not grew:
                    break
            if frozenset(lm) != s:
                continue
            violated = any(
                r.head is None
                and all((l.atom not in s) if l.naf else (l.atom in s) for l in r.body)
                for r in ground_rules
            )
            if not violated:
                models.append(s)
    return sorted(models, key=lambda m: tuple(sorted(a.render() for a in m)))


def _random_program(rng: random.Random, n_atoms: int, n_rules: int) -> Program:
    zero = ["p", "q", "r", "s", "t", "m", "n", "k"]
    unary = ["u", "v", "w"]
    consts = ["a", "b", "c"]
    atoms: list[Atom] = [Atom(p) for p in zero] + [
        Atom(p, (Constant(c),)) for p in unary for c in consts
    ]
    rng.shuffle(atoms)
    pool = atoms[:n_atoms]
    rules: list[Rule] = []
    # a few variable rules over each unary predicate pair exercise grounding
    if n_atoms >= 6 and rng.random() < 0.5:
        p1, p2 = rng.sample(unary, 2)
        if any(a.predicate == p1 for a in pool) and any(
            a.predicate == p2 for a in pool
        ):
            rules.append(
                Rule(
                    Atom(p1, (Variable("X"),)),
                    (
                        Literal(Atom(p2, (Variable("X"),))),
                        Literal(Atom(p1, (Variable("X"),)), naf=rng.random() < 0.3),
                    )
                    if rng.random() < 0.2
                    else (Literal(Atom(p2, (Variable("X"),))),),
                )
            )
    while len(rules) < n_rules:
        head = None if rng.random() < 0.1 else rng.choice(pool)
        body = tuple(
            Literal(rng.choice(pool), naf=rng.random() < 0.45)
            for _ in range(rng.randint(0 if head is not None else 1, 3))
        )
        if head is None and not body:
            continue
        try:
            rules.append(Rule(head, body))
        except UnsafeRuleError:
            continue
    return Program(tuple(rules))


def test_solver_oracle_equivalence():
    rng = random.Random(20260810)
    started = time.perf_counter()
    checked = 0
    for i in range(500):
        if i % 25 == 24:
            n_atoms = rng.randint(10, 12)  # the big band the criterion names
            n_rules = rng.randint(10, 20)
        else:
            n_atoms = rng.randint(2, 8)
            n_rules = rng.randint(1, 12)
        program = _random_program(rng, n_atoms, n_rules)
        expected = _oracle_models(program)
        got = [m.atoms for m in answer_sets(program)]
        assert got == expected, f"mismatch on program:\n{program.render()}"
        checked += 1
    elapsed = time.perf_counter() - started
    assert checked >= 500
    assert elapsed < 60.0, f"oracle suite took {elapsed:.1f}s"
    _pass(f"solver oracle equivalence ({checked} programs, {elapsed:.1f} s)")


# --- 3. seed-rule verdict ------------------------------------------------------------


def test_seed_rule_verdict(tmp_path):
    engine = DialogueEngine(JournalStore(tmp_path / "kb"))
    engine.seed(data_text("background.lp"), data_text("modes.lp"))
    annotated = Scenario("productx", "resp1", ("not_correct",))
    verdict = engine.evaluate_response(annotated)
    assert verdict.status == "unethical"
    assert [f.rule for f in verdict.fired_rules] == [
        "unethical(V) :- not_correct(V), answer(V)."
    ]
    plain = Scenario("productx", "resp2", ())
    assert engine.evaluate_response(plain).status == "ethical"
    _pass("seed-rule verdict")


# --- 4. full-memory soundness over hidden-target streams -------------------------------


FEATURES = ["not_SupportEvidence", "spreadFalseBelief", "exploitEmotions"]


def _target_stream(rng: random.Random, n_windows: int):
    body = sorted(rng.sample(FEATURES, rng.randint(1, len(FEATURES))))
    target = parse_rule(
        "unethical(V) :- answer(V), " + ", ".join(f"{p}(V)" for p in body) + "."
    )
    windows = []
    for i in range(n_windows):
        handle = f"h{i}"
        present = [p for p in FEATURES if rng.random() < 0.55]
        facts = [
            parse_atom(f"ask(customer, infoabout(prod{i}))"),
            parse_atom(f"answer({handle})"),
        ] + [parse_atom(f"{p}({handle})") for p in present]
        positive = set(body) <= set(present)
        windows.append(
            ExampleWindow(
                f"s{i}",
                tuple(facts),
                (Conclusion(parse_atom(f"unethical({handle})"), positive),),
            )
        )
    return target, windows


def _target_verdict(target: Rule, window: ExampleWindow, background: Program) -> bool:
    program = Program(
        tuple(background.rules)
        + tuple(Rule(a, ()) for a in window.facts)
        + (target,)
    )
    [conclusion] = window.conclusions
    return entails(program, conclusion.atom)


def test_full_memory_soundness_streams(background, modes):
    rng = random.Random(7341)
    started = time.perf_counter()
    for _ in range(100):
        target, windows = _target_stream(rng, 20)
        state = Hypothesis.empty()
        seen: list[ExampleWindow] = []
        for window in windows:
            state = process_window(state, window, background, modes, seen)
            seen.append(window)
            report = coverage(state, seen, background)
            assert report.ok, f"unsound after {window.id} on {target.render()}"
        # final hypothesis agrees with the hidden target everywhere
        for window in windows:
            program = Program(
                tuple(background.rules)
                + tuple(Rule(a, ()) for a in window.facts)
                + state.program_rules()
            )
            [conclusion] = window.conclusions
            assert entails(program, conclusion.atom) == _target_verdict(
                target, window, background
            )
    elapsed = time.perf_counter() - started
    _pass(f"full-memory soundness on 100 hidden-target streams ({elapsed:.1f} s)")


# --- 5. theta-subsumption suite ----------------------------------------------------------


_PREDICATES = [("answer", 1), ("flag", 1), ("link", 2), ("mark", 0)]
_CONSTANTS = ["a", "b", "c"]
_VARIABLES = ["X", "Y", "Z"]


def _random_clause(rng: random.Random) -> Rule:
    body = []
    for _ in range(rng.randint(1, 3)):
        pred, arity = rng.choice(_PREDICATES)
        args = tuple(
            Variable(rng.choice(_VARIABLES))
            if rng.random() < 0.6
            else Constant(rng.choice(_CONSTANTS))
            for _ in range(arity)
        )
        body.append(Literal(Atom(pred, args)))
    body_vars = sorted({v for lit in body for v in lit.atom.variables()})
    head_args = tuple(
        Variable(rng.choice(body_vars))
        if body_vars and rng.random() < 0.7
        else Constant(rng.choice(_CONSTANTS))
        for _ in range(rng.randint(0, 2))
    )
    return Rule(Atom("target", head_args), tuple(body))


def _more_specific(rng: random.Random, r: Rule) -> Rule:
    theta = {
        v: Constant(rng.choice(_CONSTANTS))
        for v in r.variables()
        if rng.random() < 0.4
    }
    out = substitute_rule(r, theta)
    extra = tuple(
        Literal(
            Atom(
                pred,
                tuple(Constant(rng.choice(_CONSTANTS)) for _ in range(arity)),
            )
        )
        for pred, arity in (rng.choice(_PREDICATES) for _ in range(rng.randint(0, 2)))
    )
    return Rule(out.head, out.body + extra)


def _single_rule_heads(r: Rule, facts: set[Atom]) -> set[Atom]:
    terms: list = []
    for a in facts:
        for t in a.args:
            if t not in terms:
                terms.append(t)
    variables = sorted(r.variables())
    out = set()
    assignments = (
        [{}]
        if not variables
        else (
            dict(zip(variables, combo))
            for combo in itertools.product(terms, repeat=len(variables))
        )
    )
    for theta in assignments:
        try:
            g = substitute_rule(r, theta)
        except (ValueError, UnsafeRuleError):
            continue
        if g.is_ground() and all(l.atom in facts for l in g.body):
            out.add(g.head)
    return out


def test_theta_subsumption_suite():
    rng = random.Random(515253)
    transitive_hits = 0
    for _ in range(1000):
        c = _random_clause(rng)
        d = _more_specific(rng, c)
        e = _more_specific(rng, d)
        assert theta_subsumes(c, c) and theta_subsumes(d, d) and theta_subsumes(e, e)
        if theta_subsumes(c, d) and theta_subsumes(d, e):
            transitive_hits += 1
            assert theta_subsumes(c, e)
    assert transitive_hits >= 300

    containment_hits = 0
    for _ in range(200):
        c = _random_clause(rng)
        d = _more_specific(rng, c)
        if not theta_subsumes(c, d):
            continue
        facts = set()
        for _ in range(rng.randint(0, 10)):
            pred, arity = rng.choice(_PREDICATES)
            facts.add(
                Atom(pred, tuple(Constant(rng.choice(_CONSTANTS)) for _ in range(arity)))
            )
        assert _single_rule_heads(d, facts) <= _single_rule_heads(c, facts)
        containment_hits += 1
    assert containment_hits >= 100
    _pass(
        f"theta-subsumption suite (1000 triples, {transitive_hits} transitive, "
        f"{containment_hits} containment checks)"
    )


# --- 6. persistence crash-replay ------------------------------------------------------------


def test_persistence_crash_replay(tmp_path, demo_scenarios):
    store_dir = tmp_path / "kb"
    store = JournalStore(store_dir)
    engine = DialogueEngine(store)
    engine.seed(data_text("background.lp"), data_text("modes.lp"))
    fingerprints = [store.load_state().fingerprint()]
    for body in demo_scenarios:
        engine.run_training_step(Scenario.from_json(body, require_label=True))
        fingerprints.append(store.load_state().fingerprint())

    lines = store.path.read_text("utf-8").splitlines(keepends=True)
    # every training step appended two records (window + snapshot); the seed
    # appended two more. Map each record prefix to its expected fingerprint.
    assert len(lines) == 2 + 2 * len(demo_scenarios)
    for n in range(2, len(lines) + 1, 2):
        prefix = tmp_path / f"prefix{n}"
        prefix.mkdir()
        (prefix / "journal.jsonl").write_text("".join(lines[:n]), "utf-8")
        state = JournalStore(prefix).load_state()
        assert state.fingerprint() == fingerprints[(n - 2) // 2]

    # process restart, byte-identical journal and identical replayed state
    journal_bytes = store.path.read_bytes()
    reopened = JournalStore(store_dir)
    assert reopened.load_state().fingerprint() == fingerprints[-1]
    assert store_dir.joinpath("journal.jsonl").read_bytes() == journal_bytes
    final = reopened.load_state()
    assert clause_sets_equal_mod_renaming(
        final.hypothesis.clause_rules(),
        [
            parse_rule("unethical(V) :- answer(V), not_SupportEvidence(V)."),
            parse_rule(
                "unethical(V) :- answer(V), spreadFalseBelief(V), exploitEmotions(V)."
            ),
        ],
    )
    _pass("persistence crash-replay")


# --- 7. API end-to-end -------------------------------------------------------------------------


def test_api_end_to_end(tmp_path, demo_scenarios, demo_windows, background, modes):
    client = TestClient(create_app(tmp_path / "kb"))
    steps = [client.post("/api/v1/train", json=body) for body in demo_scenarios]
    assert all(r.status_code == 200 for r in steps)

    in_process = learn_stream(demo_windows, background, modes).hypothesis
    for response, entry in zip(steps, in_process.revision_log):
        body = response.json()
        assert body["action"] == entry.action
        assert body["before"] == list(entry.before)
        assert body["after"] == list(entry.after)

    final = client.get("/api/v1/hypothesis").json()
    assert [c["text"] for c in final["clauses"]] == [
        r.render() for r in in_process.clause_rules()
    ]

    explained = client.get("/api/v1/explain", params={"atom": "unethical(sss)"})
    assert explained.status_code == 200
    root = explained.json()["derivation"]
    assert rules_equal_mod_renaming(
        parse_rule(root["rule"]),
        parse_rule(
            "unethical(V) :- answer(V), spreadFalseBelief(V), exploitEmotions(V)."
        ),
    )
    _pass("API end-to-end replay and explanation")
