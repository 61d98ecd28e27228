from __future__ import annotations

import json

import pytest

from ethoschat import data_text
from ethoschat.learner import ExampleWindow
from ethoschat.modes import parse_mode_text
from ethoschat.parser import parse_program


@pytest.fixture(scope="session")
def background():
    return parse_program(data_text("background.lp"))


@pytest.fixture(scope="session")
def modes():
    return parse_mode_text(data_text("modes.lp"))


@pytest.fixture(scope="session")
def head_predicates(modes):
    return [d.predicate for d in modes if d.kind == "head"]


@pytest.fixture(scope="session")
def demo_windows(head_predicates):
    return [
        ExampleWindow.from_payload(json.loads(line), head_predicates)
        for line in data_text("demo_windows.jsonl").splitlines()
        if line.strip()
    ]


@pytest.fixture(scope="session")
def demo_scenarios():
    return [
        json.loads(line)
        for line in data_text("demo_scenarios.jsonl").splitlines()
        if line.strip()
    ]
