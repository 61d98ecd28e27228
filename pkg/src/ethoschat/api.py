"""HTTP/JSON facade over the dialogue engine.

Versioned under /api/v1. Clauses are always shipped both as canonical text
(the renderer's output) and as structured ASTs, so clients never need their
own parser. One writer mutates the knowledge base; reads see the snapshot
current at arrival.

Error body shape: {"error": {"code", "message", "detail"}} with codes
bad_request | conflict | quarantine | inconsistent_kb | io.
"""

from __future__ import annotations

import threading
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from . import data_text
from .errors import (
    ArityClashError,
    CorruptJournalError,
    DuplicateRecordError,
    DuplicateWindowError,
    EthosChatError,
    InconsistentProgramError,
    MalformedTurnError,
    NoDerivationError,
    ProgramSyntaxError,
    QuarantineError,
    StaleHandleError,
    StorageIOError,
    UnsafeRuleError,
)
from .engine import DialogueEngine, Scenario
from .logic import Atom, Compound, Constant, Rule, Term, Variable
from .parser import parse_atom
from .store import JournalStore

API_PREFIX = "/api/v1"


def term_to_json(term: Term) -> dict:
    if isinstance(term, Variable):
        return {"kind": "variable", "name": term.name}
    if isinstance(term, Constant):
        return {"kind": "constant", "name": term.name}
    assert isinstance(term, Compound)
    return {
        "kind": "compound",
        "functor": term.functor,
        "args": [term_to_json(a) for a in term.args],
    }


def atom_to_json(atom: Atom) -> dict:
    return {
        "predicate": atom.predicate,
        "args": [term_to_json(a) for a in atom.args],
    }


def rule_to_json(rule: Rule) -> dict:
    return {
        "head": atom_to_json(rule.head) if rule.head is not None else None,
        "body": [
            {"atom": atom_to_json(lit.atom), "naf": lit.naf} for lit in rule.body
        ],
    }


def _error_response(code: str, status: int, message: str, detail: str = "") -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"error": {"code": code, "message": message, "detail": detail}},
    )


_ERROR_MAP: list[tuple[type, str, int]] = [
    (QuarantineError, "quarantine", 409),
    (DuplicateWindowError, "conflict", 409),
    (DuplicateRecordError, "conflict", 409),
    (StaleHandleError, "conflict", 409),
    (InconsistentProgramError, "inconsistent_kb", 409),
    (MalformedTurnError, "bad_request", 400),
    (ProgramSyntaxError, "bad_request", 400),
    (UnsafeRuleError, "bad_request", 400),
    (ArityClashError, "bad_request", 400),
    (CorruptJournalError, "io", 500),
    (StorageIOError, "io", 500),
]


def create_app(store_dir: str | Path, seed_defaults: bool = True) -> FastAPI:
    """Build the application around one knowledge base. An empty store is
    seeded with the bundled background rules and mode declarations."""
    store = JournalStore(store_dir)
    engine = DialogueEngine(store)
    if store.is_empty and seed_defaults:
        engine.seed(data_text("background.lp"), data_text("modes.lp"))

    app = FastAPI(title="ethoschat", version="1")
    app.state.engine = engine
    write_lock = threading.Lock()

    @app.exception_handler(EthosChatError)
    async def _domain_error(request: Request, exc: EthosChatError):
        for etype, code, status in _ERROR_MAP:
            if isinstance(exc, etype):
                detail = getattr(exc, "reason", "") or getattr(exc, "detail", "")
                return _error_response(code, status, str(exc), str(detail))
        return _error_response("io", 500, str(exc))

    @app.exception_handler(RequestValidationError)
    async def _validation_error(request: Request, exc: RequestValidationError):
        return _error_response("bad_request", 400, "invalid request body", str(exc.errors()))

    def _hypothesis_json(hypothesis, version: int) -> dict:
        return {
            "version": version,
            "clauses": [
                {
                    "text": c.rule.render(),
                    "ast": rule_to_json(c.rule),
                    "support": [k.to_payload() for k in c.support],
                    "supportSize": len(c.support),
                }
                for c in hypothesis.clauses
            ],
            "pool": [k.to_payload() for k in hypothesis.pool],
            "revisionLog": [e.to_payload() for e in hypothesis.revision_log],
            "annotationVocabulary": engine.annotation_vocabulary(),
            "background": engine.background_text,
        }

    @app.post(API_PREFIX + "/evaluate")
    async def evaluate(body: dict):
        scenario = Scenario.from_json(body)
        return engine.evaluate_response(scenario).to_dict()

    @app.post(API_PREFIX + "/train")
    async def train(body: dict):
        scenario = Scenario.from_json(body, require_label=True)
        with write_lock:
            step = engine.run_training_step(scenario)
        return step.to_dict()

    @app.get(API_PREFIX + "/hypothesis")
    async def hypothesis(version: Optional[int] = None):
        if version is None:
            return _hypothesis_json(engine.hypothesis, engine.hypothesis_version)
        snapshot = engine.store.get_hypothesis(version)
        if snapshot is None:
            return _error_response(
                "bad_request", 404, f"no hypothesis snapshot with version {version}"
            )
        return _hypothesis_json(snapshot, version)

    @app.get(API_PREFIX + "/windows")
    async def windows():
        return {"windows": engine.store.windows()}

    @app.get(API_PREFIX + "/explain")
    async def explain_endpoint(atom: str):
        try:
            query = parse_atom(atom)
        except EthosChatError as err:
            return _error_response("bad_request", 400, f"bad atom: {err}")
        try:
            derivation = engine.explain_atom(query)
        except NoDerivationError as err:
            return _error_response("bad_request", 404, str(err))
        return {"atom": query.render(), "derivation": derivation.to_dict()}

    return app
