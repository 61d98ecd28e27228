from __future__ import annotations

import pytest
from fastapi.testclient import TestClient

from ethoschat.api import create_app
from ethoschat.learner import learn_stream


@pytest.fixture
def client(tmp_path):
    return TestClient(create_app(tmp_path / "kb"))


def train_all(client, demo_scenarios):
    return [
        client.post("/api/v1/train", json=body).json() for body in demo_scenarios
    ]


def test_evaluate_demo_verdicts(client, demo_scenarios):
    train_all(client, demo_scenarios)
    w6 = {
        "request": {"product": "productT"},
        "response": {"handle": "ttt"},
        "annotations": ["exploitEmotions", "spreadFalseBelief"],
    }
    body = client.post("/api/v1/evaluate", json=w6).json()
    assert body["status"] == "unethical"
    assert body["firedRules"]
    w5 = {
        "request": {"product": "productU"},
        "response": {"handle": "uuu"},
        "annotations": ["not_exploitEmotions", "not_spreadFalseBelief"],
    }
    assert client.post("/api/v1/evaluate", json=w5).json()["status"] == "ethical"


def test_evaluate_is_side_effect_free(client, demo_scenarios):
    train_all(client, demo_scenarios)
    before = client.get("/api/v1/hypothesis").json()
    client.post(
        "/api/v1/evaluate",
        json={"request": {"product": "p"}, "response": {"handle": "zzz"}},
    )
    assert client.get("/api/v1/hypothesis").json() == before


def test_evaluate_missing_response_field_is_400(client):
    r = client.post("/api/v1/evaluate", json={"request": {"product": "p"}})
    assert r.status_code == 400
    assert r.json()["error"]["code"] == "bad_request"


def test_train_replay_matches_in_process_run(
    client, demo_scenarios, demo_windows, background, modes
):
    steps = train_all(client, demo_scenarios)
    in_process = learn_stream(demo_windows, background, modes).hypothesis
    api_actions = [s["action"] for s in steps]
    assert api_actions == [e.action for e in in_process.revision_log]
    for step, entry in zip(steps, in_process.revision_log):
        assert step["before"] == list(entry.before)
        assert step["after"] == list(entry.after)
    final = client.get("/api/v1/hypothesis").json()
    assert [c["text"] for c in final["clauses"]] == [
        r.render() for r in in_process.clause_rules()
    ]


def test_train_duplicate_id_conflicts_and_preserves_state(client, demo_scenarios):
    train_all(client, demo_scenarios)
    before = client.get("/api/v1/hypothesis").json()
    dup = dict(demo_scenarios[0])
    dup["response"] = {"handle": "fresh-handle"}
    r = client.post("/api/v1/train", json=dup)
    assert r.status_code == 409
    assert client.get("/api/v1/hypothesis").json() == before


def test_train_quarantine_is_409(client):
    ok = {
        "id": "a1",
        "request": {"product": "pa"},
        "response": {"handle": "aaa"},
        "annotations": ["spreadFalseBelief"],
        "label": "unethical",
    }
    assert client.post("/api/v1/train", json=ok).status_code == 200
    bad = {
        "id": "b1",
        "request": {"product": "pb"},
        "response": {"handle": "bbb"},
        "annotations": ["spreadFalseBelief"],
        "label": "ethical",
    }
    r = client.post("/api/v1/train", json=bad)
    assert r.status_code == 409
    assert r.json()["error"]["code"] == "quarantine"


def test_hypothesis_versions(client, demo_scenarios):
    train_all(client, demo_scenarios)
    v1 = client.get("/api/v1/hypothesis", params={"version": 1}).json()
    assert [c["text"] for c in v1["clauses"]] == ["unethical(V) :- answer(V)."]
    latest = client.get("/api/v1/hypothesis").json()
    assert latest["version"] == 6
    assert client.get("/api/v1/hypothesis", params={"version": 99}).status_code == 404


def test_hypothesis_ships_ast_and_vocabulary(client, demo_scenarios):
    train_all(client, demo_scenarios)
    body = client.get("/api/v1/hypothesis").json()
    clause = body["clauses"][0]
    assert clause["ast"]["head"]["predicate"] == "unethical"
    assert clause["ast"]["body"][0]["atom"]["predicate"] == "answer"
    assert clause["supportSize"] == len(clause["support"])
    assert "spreadFalseBelief" in body["annotationVocabulary"]


def test_windows_listing_in_sequence_order(client, demo_scenarios):
    train_all(client, demo_scenarios)
    listing = client.get("/api/v1/windows").json()["windows"]
    assert [w["id"] for w in listing] == ["w1", "w2", "w3", "w4", "w5", "w6"]


def test_explain_endpoint(client, demo_scenarios):
    train_all(client, demo_scenarios)
    r = client.get("/api/v1/explain", params={"atom": "unethical(sss)"})
    assert r.status_code == 200
    derivation = r.json()["derivation"]
    assert "spreadFalseBelief" in derivation["rule"]
    assert derivation["substitution"] == {"V": "sss"}
    assert client.get("/api/v1/explain", params={"atom": "unethical(rrr)"}).status_code == 404
    assert client.get("/api/v1/explain", params={"atom": "not an atom"}).status_code == 400


def test_fresh_store_is_seeded_with_defaults(client):
    body = client.get("/api/v1/hypothesis").json()
    assert body["clauses"] == []
    assert "not_correct" in body["background"]
    assert "supportEvidence" in body["annotationVocabulary"]


def test_state_survives_restart_byte_identically(tmp_path, demo_scenarios):
    store_dir = tmp_path / "kb"
    client = TestClient(create_app(store_dir))
    train_all(client, demo_scenarios)
    first = client.get("/api/v1/hypothesis").json()
    journal_bytes = (store_dir / "journal.jsonl").read_bytes()

    reopened = TestClient(create_app(store_dir))
    assert reopened.get("/api/v1/hypothesis").json() == first
    assert (store_dir / "journal.jsonl").read_bytes() == journal_bytes
