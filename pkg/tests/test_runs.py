import itertools

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from pdaexpl.automata import AlphabetMismatch, Configuration, InvalidRun, ModeMismatch, NotAStep, make_pda, max_out_degree
from pdaexpl.constructions import block_pda, multiple_dpda, suffix_one_pda, union_pda
from pdaexpl.runs import (
    Run,
    Verdict,
    accepting_run_extensions,
    bounded_accepts,
    bounded_accepts_empty_stack,
    check_run,
    enumerate_runs,
    epsilon_closure,
    indexed_modes,
    is_valid_run,
    read_letter,
    splice,
    steps_of_run,
)


def _words(letters, max_len):
    for n in range(max_len + 1):
        for t in itertools.product(letters, repeat=n):
            yield "".join(t)


def test_read_letter_follows_epsilon_then_letter():
    pda = union_pda(1)
    moves = read_letter(pda, pda.initial_configuration(), "a")
    targets = moves.targets()
    assert Configuration("d1.qa", ("X", "Z")) in targets
    assert Configuration("d2.qa@X/X", ("X", "Z")) in targets
    assert all(m.path[0].is_epsilon for m in moves)
    assert all(m.via_accepting for m in moves)
    assert not moves.truncated


def test_read_letter_rejects_foreign_letter():
    pda = multiple_dpda(1)
    with pytest.raises(AlphabetMismatch):
        read_letter(pda, pda.initial_configuration(), "c")


def test_strict_checkpoint_ignores_epsilon_acceptance():
    pda = make_pda(
        [("p", None, "Z", "f", "Z"), ("f", "a", "Z", "p", "Z")],
        "p",
        "Z",
        ["f"],
    )
    start = pda.initial_configuration()
    assert read_letter(pda, start, "a").moves[0].via_accepting
    assert not read_letter(pda, start, "a", strict=True).moves[0].via_accepting


def test_epsilon_cycle_is_truncated():
    pda = make_pda([("p", None, "Z", "p", "AZ"), ("p", None, "A", "p", "AA")], "p", "Z", ["p"], input_alphabet="a")
    closure = epsilon_closure(pda, pda.initial_configuration(), eps_budget=5)
    assert closure.truncated
    assert len(closure.configurations) == 6
    assert bounded_accepts(pda, "a", eps_budget=5) is Verdict.UNKNOWN


def test_bounded_accepts(counting_pda):
    assert bounded_accepts(counting_pda, "aabb") is Verdict.ACCEPT
    assert bounded_accepts(counting_pda, "aab") is Verdict.REJECT
    assert bounded_accepts(counting_pda, "") is Verdict.ACCEPT


def test_bounded_accepts_empty_stack():
    pda = make_pda([("p", "a", "Z", "p", "AZ"), ("p", "b", "A", "p", ""), ("p", None, "Z", "p", "")], "p", "Z", [])
    assert bounded_accepts_empty_stack(pda, "ab") is Verdict.ACCEPT
    assert bounded_accepts_empty_stack(pda, "a") is Verdict.REJECT


def test_enumerate_runs_branching(branching_pda):
    for word in ("", "a", "ab", "bab", "abba"):
        runs = enumerate_runs(branching_pda, word)
        assert len(runs) == 2 ** len(word)
        assert all(is_valid_run(branching_pda, r) for r in runs)


def test_run_count_bounded_by_out_degree(even_b_pda, branching_pda):
    for pda in (even_b_pda, branching_pda):
        m = max_out_degree(pda)
        for word in _words("ab", 6):
            assert len(enumerate_runs(pda, word)) <= m ** len(word)


def test_check_run_detects_bad_transition(counting_pda):
    run = enumerate_runs(counting_pda, "ab").runs[0]
    check_run(counting_pda, run)
    forged = Run("ab", run.configurations[:-1] + (Configuration("done", ("A",)),), run.transitions)
    with pytest.raises(InvalidRun):
        check_run(counting_pda, forged)
    wrong_word = Run("aa", run.configurations, run.transitions)
    assert not is_valid_run(counting_pda, wrong_word)


def _brute_steps(run):
    heights = run.heights
    return {s for s in range(len(heights)) if all(heights[t] >= heights[s] for t in range(s, len(heights)))}


@st.composite
def counting_runs(draw):
    n = draw(st.integers(min_value=0, max_value=4))
    m = draw(st.integers(min_value=0, max_value=n))
    return "a" * n + "b" * m


@settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(counting_runs())
def test_steps_match_brute_force(counting_pda, word):
    for run in enumerate_runs(counting_pda, word):
        assert steps_of_run(run) == _brute_steps(run)
        assert len(run.configurations) - 1 in steps_of_run(run)


def test_indexed_modes(counting_pda):
    run = max(enumerate_runs(counting_pda, "aabb"), key=len)
    modes = indexed_modes(run, 2)
    assert set(modes) == steps_of_run(run)
    last = modes[len(run.configurations) - 1]
    assert last.state == run.final.state
    assert last.residue == 0
    with pytest.raises(ValueError):
        indexed_modes(run, 0)


def test_splice_at_matching_modes(counting_pda):
    long_run = max(enumerate_runs(counting_pda, "aabb"), key=len)
    short_run = max(enumerate_runs(counting_pda, "ab"), key=len)
    assert long_run.configurations[4] == Configuration("pop", ("Z",))
    assert short_run.configurations[2] == Configuration("pop", ("Z",))
    spliced = splice(long_run, 4, short_run, 2)
    assert spliced.word == "ab"
    assert is_valid_run(counting_pda, spliced)
    assert counting_pda.is_accepting(spliced.final)


def test_splice_preconditions(counting_pda):
    run = max(enumerate_runs(counting_pda, "aabb"), key=len)
    with pytest.raises(NotAStep):
        splice(run, 1, run, 0)
    last = len(run.configurations) - 1
    with pytest.raises(ModeMismatch):
        splice(run, 0, run, last)


def test_extension_table_even_b(even_b_pda):
    table = accepting_run_extensions(even_b_pda, "", "b", 6, 6)
    expected = {(i, j) for j in range(1, 7) for i in range(0, j) if i % 2 == 0 and j % 2 == 0}
    assert table.pair_set() == expected
    shifted = accepting_run_extensions(even_b_pda, "b", "b", 4, 4)
    assert shifted.pair_set() == {(i, j) for j in range(1, 5) for i in range(0, j) if i % 2 and j % 2}


def test_extension_table_empty_on_disjoint_branches():
    pda = union_pda(1)
    for n in range(4):
        assert accepting_run_extensions(pda, "a" * n, "b", 4, 4).pair_set() == set()


_SPLICE_CORPUS = {
    "union1": lambda: union_pda(1),
    "block": block_pda,
    "suffix_one2": lambda: suffix_one_pda(2),
}


def _splice_all(pda, first, second):
    done = 0
    for run1 in first:
        modes1 = {s: run1.configurations[s].mode for s in steps_of_run(run1)}
        for run2 in second:
            for s1 in steps_of_run(run2):
                mode = run2.configurations[s1].mode
                for s0, mode0 in modes1.items():
                    if mode0 != mode:
                        continue
                    spliced = splice(run1, s0, run2, s1)
                    assert is_valid_run(pda, spliced), (run1.word, s0, run2.word, s1)
                    done += 1
    return done


@pytest.mark.parametrize("name", sorted(_SPLICE_CORPUS))
@settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(data=st.data())
def test_splices_at_matching_steps_are_runs(name, data):
    pda = _SPLICE_CORPUS[name]()
    letters = sorted(pda.input_alphabet)
    u = data.draw(st.text(alphabet=letters, max_size=4))
    v = data.draw(st.text(alphabet=letters, max_size=4))
    _splice_all(pda, enumerate_runs(pda, u), enumerate_runs(pda, v))


def test_union_splices_enumerated():
    pda = union_pda(1)
    runs = [run for word in _words("ab", 3) for run in enumerate_runs(pda, word)]
    assert _splice_all(pda, runs, runs) > 0


@pytest.mark.parametrize("name", sorted(_SPLICE_CORPUS))
def test_steps_match_brute_force_on_corpus(name):
    pda = _SPLICE_CORPUS[name]()
    for word in _words(sorted(pda.input_alphabet), 3):
        for run in enumerate_runs(pda, word):
            assert steps_of_run(run) == _brute_steps(run)
