"""Ethical-reasoning chatbot engine.

Answer-set solving over a small rule language, plus an incremental learner
that induces and revises ethics rules from labeled dialogue scenarios.
"""

from importlib import resources

__version__ = "0.1.0"


def data_text(name: str) -> str:
    """Read a bundled data file (seed background, mode declarations, demo
    training streams) as text."""
    return resources.files("ethoschat.data").joinpath(name).read_text("utf-8")
