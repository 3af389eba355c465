from functools import partial

import pytest

from pdaexpl.automata import Configuration, make_pda, max_out_degree, validate
from pdaexpl.constructions import (
    block_k_pda,
    block_pda,
    demo_turing_machine,
    invalc_pda,
    mod_pda,
    multiple_dpda,
    suffix_one_pda,
    union_pda,
)
from pdaexpl.game import (
    QUIT,
    GameError,
    GameSolver,
    IllegalMove,
    Ply,
    Transcript,
    Winner,
    branch_per_token,
    check_strategy,
    play_interactive,
    replay_transcript,
    scripted_round_robin,
    solve,
    solve_parameterized,
    strategy_to_dict,
    token_function,
)
from pdaexpl.languages import Union
from pdaexpl.turing import invalc_oracle


def _scripted(lines):
    feed = iter(lines)
    return lambda prompt: next(feed)


def test_union_one_token_loses():
    outcome = solve(union_pda(1), 1, 3)
    assert outcome.winner is Winner.SPOILER
    assert len(outcome.witness) == 3
    assert Union(1).contains(outcome.losing_prefix)
    assert outcome.principal_variation
    assert "spoiler wins" in outcome.describe()


def test_union_two_tokens_win():
    outcome = solve(union_pda(1), 2, 8)
    assert outcome.winner is Winner.DETERMINER
    assert outcome.witness is None
    assert outcome.positions > 0
    assert outcome.to_dict()["winner"] == "determiner"


def test_union_two_needs_three_tokens():
    pda = union_pda(2)
    assert solve(pda, 2, 4).winner is Winner.SPOILER
    assert solve(pda, 3, 9).winner is Winner.DETERMINER
    assert check_strategy(pda, 3, branch_per_token(), 9).ok


def test_branch_per_token_with_too_few_tokens():
    check = check_strategy(union_pda(1), 1, branch_per_token(), 3)
    assert not check.ok
    assert check.failing_play == "abb"
    assert check.losing_prefix == "abb"


def test_solved_strategy_passes_checker():
    pda = union_pda(1)
    outcome = solve(pda, 2, 6)
    assert outcome.winner is Winner.DETERMINER
    assert check_strategy(pda, 2, outcome.strategy, 6).ok


def test_block_single_token_loses():
    assert solve(block_pda(), 1, 5).winner is Winner.SPOILER
    assert solve(block_k_pda(1), 1, 6).winner is Winner.SPOILER


@pytest.mark.slow
def test_block_linear_tokens_win():
    outcome = solve_parameterized(block_pda(), token_function("linear"), 6)
    assert outcome.winner is Winner.DETERMINER
    assert outcome.announced == 6
    assert outcome.k == 6


def test_mod_two_tokens():
    assert solve(mod_pda(2), 2, 6).winner is Winner.DETERMINER


def test_suffix_one_single_token_loses():
    assert solve(suffix_one_pda(2), 1, 3).winner is Winner.SPOILER


@pytest.mark.parametrize("n", [2, 3])
def test_round_robin_on_suffix_one(n):
    check = check_strategy(suffix_one_pda(n), n, scripted_round_robin(n), 2 * n + 2)
    assert check.ok, check.failing_play
    assert check.plays == 2 ** (2 * n + 2)


def test_parallel_solver_agrees():
    pda = union_pda(2)
    for k, horizon in ((2, 4), (3, 6)):
        assert solve(pda, k, horizon, jobs=2).winner is solve(pda, k, horizon).winner


def test_universal_automaton_short_circuits():
    pda = make_pda([("p", "a", "Z", "p", "Z"), ("p", "b", "Z", "p", "Z")], "p", "Z", ["p"])
    outcome = solve(pda, 1, 12)
    assert outcome.winner is Winner.DETERMINER
    assert outcome.positions == 1


def test_undecided_membership_gives_unknown():
    outcome = solve(multiple_dpda(1), 1, 2, membership=lambda w: None)
    assert outcome.winner is Winner.UNKNOWN
    assert outcome.diagnostics


def test_epsilon_budget_is_reported():
    pda = make_pda([("p", None, "Z", "p", "AZ"), ("p", None, "A", "p", "AA")], "p", "Z", ["p"], input_alphabet="a")
    outcome = solve(pda, 1, 2, eps_budget=5)
    assert outcome.truncated
    assert outcome.winner is Winner.DETERMINER


def test_solver_arguments():
    with pytest.raises(GameError):
        GameSolver(union_pda(1), 0, 3)
    with pytest.raises(GameError):
        GameSolver(union_pda(1), 1, -1)


def test_token_functions(branching_pda):
    assert token_function("linear")(5) == 5
    assert token_function("const:3")(9) == 3
    assert token_function("4")(1) == 4
    assert token_function("exp", branching_pda)(3) == max_out_degree(branching_pda) ** 3
    with pytest.raises(GameError):
        token_function("bogus")
    with pytest.raises(GameError):
        solve_parameterized(union_pda(1), lambda n: 0, 3)


def test_strategy_table():
    solver = GameSolver(union_pda(1), 2, 4)
    assert solver.solve().winner is Winner.DETERMINER
    table = strategy_to_dict(solver)
    assert table["k"] == 2
    assert table["entries"]
    assert all(len(e["reply"]) == len(e["tokens"]) for e in table["entries"])


def test_interactive_spoiler_round_trip(even_b_pda):
    lines = []
    transcript = play_interactive(even_b_pda, 1, "spoiler", horizon=2, read=_scripted(["a", "b"]), write=lines.append)
    assert transcript.result == "determiner"
    assert transcript.word == "ab"
    assert any("survives" in line for line in lines)

    again = Transcript.from_dict(transcript.to_dict())
    assert again.word == "ab"
    assert again.plies == transcript.plies
    assert replay_transcript(even_b_pda, again).ok


def test_interactive_spoiler_beats_one_token():
    lines = []
    transcript = play_interactive(union_pda(1), 1, "spoiler", horizon=3, read=_scripted(["a", "b", "b", QUIT]), write=lines.append)
    assert transcript.result == "spoiler"
    assert any("determiner loses" in line for line in lines)


def test_interactive_rejects_bad_letters(even_b_pda):
    lines = []
    transcript = play_interactive(even_b_pda, 1, "spoiler", horizon=1, read=_scripted(["c", "a"]), write=lines.append)
    assert transcript.result == "determiner"
    assert any("letter must be one of" in line for line in lines)


def test_interactive_determiner(even_b_pda):
    lines = []
    transcript = play_interactive(even_b_pda, 1, "determiner", horizon=2, read=_scripted(["0", "0"]), write=lines.append)
    assert transcript.result == "determiner"
    assert transcript.word == "aa"


def test_interactive_quit(even_b_pda):
    transcript = play_interactive(even_b_pda, 1, "spoiler", read=_scripted([QUIT]), write=lambda line: None)
    assert transcript.result == QUIT
    assert transcript.plies == []
    with pytest.raises(GameError):
        play_interactive(even_b_pda, 1, "referee", read=_scripted([]), write=lambda line: None)


def test_replay_rejects_unreachable_move(even_b_pda):
    transcript = Transcript(1, "spoiler", "a", [Ply("a", (Configuration("o", ("Z",)),))], "determiner")
    with pytest.raises(IllegalMove):
        replay_transcript(even_b_pda, transcript)


def test_replay_detects_stopped_token(even_b_pda):
    transcript = Transcript(1, "spoiler", "bb", [Ply("b", (None,)), Ply("b", (None,))], "spoiler")
    check = replay_transcript(even_b_pda, transcript)
    assert not check.ok
    assert check.losing_prefix == "bb"


def test_malformed_transcript():
    with pytest.raises(GameError):
        Transcript.from_dict({"k": 2, "plies": [{"letter": "a", "tokens": [None]}]})
    with pytest.raises(GameError):
        Transcript.from_dict([])


# family -> (factory, most tokens tried, longest horizon tried)
_CORPUS = {
    "multiple1": (lambda: multiple_dpda(1), 2, 8),
    "multiple2": (lambda: multiple_dpda(2), 2, 8),
    "multiple3": (lambda: multiple_dpda(3), 2, 8),
    "union1": (lambda: union_pda(1), 3, 6),
    "suffix_one2": (lambda: suffix_one_pda(2), 3, 6),
    "mod2": (lambda: mod_pda(2), 3, 6),
    "block": (block_pda, 2, 5),
}


@pytest.mark.parametrize("name", sorted(_CORPUS))
def test_game_value_is_monotone(name):
    make, max_k, max_h = _CORPUS[name]
    pda = make()
    table = {(k, h): solve(pda, k, h).winner for k in range(1, max_k + 1) for h in range(1, max_h + 1)}
    assert Winner.UNKNOWN not in table.values()
    for (k, h), winner in table.items():
        if winner is Winner.DETERMINER and k < max_k:
            assert table[(k + 1, h)] is Winner.DETERMINER, (k, h)
        if winner is Winner.SPOILER and h < max_h:
            assert table[(k, h + 1)] is Winner.SPOILER, (k, h)
    if validate(pda).deterministic:
        assert all(table[(1, h)] is Winner.DETERMINER for h in range(1, max_h + 1))


def test_deterministic_automata_need_one_token(even_b_pda):
    for pda in (even_b_pda, multiple_dpda(1), multiple_dpda(4)):
        assert validate(pda).deterministic
        assert solve(pda, 1, 8).winner is Winner.DETERMINER


@pytest.mark.parametrize("n", [1, 2, 3])
def test_round_robin_on_mod(n):
    check = check_strategy(mod_pda(n), n, scripted_round_robin(n), 2 * n + 2)
    assert check.ok, check.failing_play
    assert check.plays == 2 ** (2 * n + 2)


@pytest.mark.slow
def test_invalid_computations_two_tokens_win():
    tm = demo_turing_machine()
    outcome = solve(invalc_pda(tm), 2, 12, membership=partial(invalc_oracle, tm))
    assert outcome.winner is Winner.DETERMINER
