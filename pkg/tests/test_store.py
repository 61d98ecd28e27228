from __future__ import annotations

import json

import pytest

from ethoschat import data_text
from ethoschat.errors import CorruptJournalError, DuplicateRecordError
from ethoschat.learner import Hypothesis, learn_stream
from ethoschat.store import JournalStore


@pytest.fixture
def store(tmp_path):
    return JournalStore(tmp_path / "kb")


def seeded(store):
    store.set_background(data_text("background.lp"))
    store.set_modes(data_text("modes.lp"))
    return store


def test_fresh_store_is_empty(store):
    assert store.is_empty
    state = store.load_state()
    assert state.windows == ()
    assert state.hypothesis.clauses == ()


def test_append_window_sequences(store, demo_windows):
    seeded(store)
    assert store.append_window(demo_windows[0]) == 3  # after the two seed records
    assert store.append_window(demo_windows[1]) == 4


def test_duplicate_window_id_rejected(store, demo_windows):
    seeded(store)
    store.append_window(demo_windows[0])
    with pytest.raises(DuplicateRecordError):
        store.append_window(demo_windows[0])


def test_journal_line_layout(store, demo_windows):
    seeded(store)
    store.append_window(demo_windows[0])
    line = store.path.read_text("utf-8").splitlines()[-1]
    obj = json.loads(line)
    assert list(obj.keys()) == ["sequence", "kind", "timestamp", "schema_version", "payload"]
    assert obj["kind"] == "window"
    assert obj["schema_version"] == 1
    assert obj["payload"]["id"] == "w1"
    assert obj["payload"]["conclusions"][0] == {
        "atom": "unethical(healthy-way-to-loose-wieght)",
        "polarity": "positive",
    }


def test_snapshot_versions_are_distinct(store, demo_windows, background, modes):
    seeded(store)
    h1 = learn_stream(demo_windows[:1], background, modes).hypothesis
    h_final = learn_stream(demo_windows, background, modes).hypothesis
    store.snapshot_hypothesis(h1)
    store.snapshot_hypothesis(h_final)
    v1 = store.get_hypothesis(1)
    v2 = store.get_hypothesis(2)
    assert [c.render() for c in v1.clauses] == ["unethical(V) :- answer(V)."]
    assert len(v2.clauses) == 2
    assert store.get_hypothesis(3) is None


def test_empty_hypothesis_snapshot_round_trips(store):
    seeded(store)
    store.snapshot_hypothesis(Hypothesis.empty())
    assert store.get_hypothesis(1).clauses == ()


def test_state_round_trip(store, demo_windows, background, modes):
    seeded(store)
    result = learn_stream(demo_windows, background, modes)
    for w in demo_windows:
        store.append_window(w)
    store.snapshot_hypothesis(result.hypothesis)
    state = store.load_state()
    assert state.windows == tuple(demo_windows)
    assert state.hypothesis.to_payload() == result.hypothesis.to_payload()
    assert state.background.render() == background.render()


def test_reload_equals_live_state(tmp_path, demo_windows, background, modes):
    a = seeded(JournalStore(tmp_path / "kb"))
    h = Hypothesis.empty()
    seen = []
    from ethoschat.learner import process_window

    for w in demo_windows:
        h = process_window(h, w, background, modes, seen)
        seen.append(w)
        a.append_window(w)
        a.snapshot_hypothesis(h)
    live = a.load_state().fingerprint()
    reopened = JournalStore(tmp_path / "kb").load_state().fingerprint()
    assert live == reopened


def test_crash_replay_every_prefix(tmp_path, demo_windows, background, modes):
    # build a full journal, then re-load every record-boundary prefix
    path = tmp_path / "kb"
    store = seeded(JournalStore(path))
    result = learn_stream(demo_windows, background, modes)
    for w in demo_windows:
        store.append_window(w)
    store.snapshot_hypothesis(result.hypothesis)

    lines = store.path.read_text("utf-8").splitlines(keepends=True)
    for n in range(len(lines) + 1):
        prefix_dir = tmp_path / f"prefix{n}"
        prefix_dir.mkdir()
        (prefix_dir / "journal.jsonl").write_text("".join(lines[:n]), "utf-8")
        state = JournalStore(prefix_dir).load_state()
        assert len(state.windows) == max(0, min(n - 2, len(demo_windows)))


def test_truncated_last_line_is_corruption(tmp_path, demo_windows):
    path = tmp_path / "kb"
    store = seeded(JournalStore(path))
    store.append_window(demo_windows[0])
    raw = store.path.read_text("utf-8")
    store.path.write_text(raw[: len(raw) - 25], "utf-8")  # cut inside the record
    with pytest.raises(CorruptJournalError) as err:
        JournalStore(path)
    assert err.value.sequence == 3


def test_out_of_order_sequence_is_corruption(tmp_path, demo_windows):
    path = tmp_path / "kb"
    store = seeded(JournalStore(path))
    store.append_window(demo_windows[0])
    lines = store.path.read_text("utf-8").splitlines(keepends=True)
    (path / "journal.jsonl").write_text(lines[0] + lines[2], "utf-8")
    with pytest.raises(CorruptJournalError):
        JournalStore(path)
