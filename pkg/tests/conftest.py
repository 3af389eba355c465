import pytest

from pdaexpl.automata import make_pda, save_pda
from pdaexpl.grammar import clear_grammar_cache
from pdaexpl.settings import _ENV_KEYS
from pdaexpl.turing import make_machine


@pytest.fixture(autouse=True)
def isolated_home(tmp_path, monkeypatch):
    home = tmp_path / "home"
    monkeypatch.setenv("PDAEXPL_HOME", str(home))
    monkeypatch.delenv("PDAEXPL_DATA_DIR", raising=False)
    for env in _ENV_KEYS.values():
        monkeypatch.delenv(env, raising=False)
    yield home
    clear_grammar_cache()


@pytest.fixture
def even_b_pda():
    """Deterministic PDA accepting words with an even number of b's."""
    return make_pda(
        [
            ("e", "a", "Z", "e", "Z"),
            ("e", "b", "Z", "o", "Z"),
            ("o", "a", "Z", "o", "Z"),
            ("o", "b", "Z", "e", "Z"),
        ],
        "e",
        "Z",
        ["e"],
    )


@pytest.fixture
def branching_pda():
    """Epsilon-free PDA with exactly two moves on every letter from every state."""
    transitions = []
    for source in "pq":
        for letter in "ab":
            for target in "pq":
                transitions.append((source, letter, "Z", target, "Z"))
    return make_pda(transitions, "p", "Z", ["q"])


@pytest.fixture
def counting_pda():
    """a^n b^n for n >= 0, with an epsilon move to the accepting state."""
    return make_pda(
        [
            ("push", "a", "Z", "push", "AZ"),
            ("push", "a", "A", "push", "AA"),
            ("push", "b", "A", "pop", ""),
            ("pop", "b", "A", "pop", ""),
            ("push", None, "Z", "done", "Z"),
            ("pop", None, "Z", "done", "Z"),
        ],
        "push",
        "Z",
        ["done"],
    )


@pytest.fixture
def write_pda(tmp_path):
    def _write(pda, name="automaton.json"):
        path = tmp_path / name
        assert save_pda(str(path), pda)
        return str(path)

    return _write


@pytest.fixture
def eraser_tm():
    """Machine that blanks its first cell, steps off the left edge and halts after four steps."""
    delta = {
        ("p", "1"): ("q", "_", "R"),
        ("p", "_"): ("q", "_", "R"),
        ("q", "1"): ("r", "1", "L"),
        ("q", "_"): ("r", "_", "L"),
        ("r", "1"): ("s", "1", "R"),
        ("r", "_"): ("s", "1", "R"),
        ("s", "1"): ("A", "1", "R"),
        ("s", "_"): ("A", "_", "R"),
    }
    return make_machine("pqrsAR", "1", "1_", "_", delta, "p", "A", "R")
