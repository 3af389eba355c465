import pytest

from pdaexpl.automata import AlphabetMismatch
from pdaexpl.constructions import block_pda, build_family, demo_turing_machine, relabel_extension
from pdaexpl.grammar import exact_accepts
from pdaexpl.languages import (
    LS,
    Block,
    BlockK,
    BlockS,
    Invalc,
    LanguageError,
    Li,
    Ln,
    ModN,
    Union,
    decide,
    enumerate_language,
    spec_for_family,
    spec_from_dict,
    words,
)
from pdaexpl.runs import Verdict, accepting_run_extensions, bounded_accepts
from pdaexpl.turing import valc_string


def test_enumerate_union():
    assert enumerate_language(Union(1), 4) == ["", "ab", "abb", "aabb"]


def test_enumerate_mod():
    assert enumerate_language(ModN(1), 2) == ["", "1", "11"]
    assert enumerate_language(ModN(2), 2) == ["", "0", "1", "10", "11"]


def test_membership_examples():
    assert decide(Li(2), "aabbbb")
    assert not decide(Li(2), "aabbb")
    assert decide(Block(), "aa#a#b")
    assert not decide(Block(), "aa#a#bbb")
    assert decide(BlockK(1), "aa#a#b")
    assert not decide(BlockK(1), "a#a#a#b")
    assert decide(Ln(3), "0100")
    assert not decide(Ln(3), "10")


def test_decide_rejects_foreign_letters():
    with pytest.raises(AlphabetMismatch):
        decide(Li(1), "abc")


def test_pair_tables():
    ls = LS({2: frozenset({(1, 2)})})
    assert decide(ls, "aabbcccc")
    assert not decide(ls, "abc")
    block_s = BlockS({"a#": frozenset({(1, 3)})})
    assert decide(block_s, "a#bcc")
    assert not decide(block_s, "a#bc")


def test_spec_round_trip():
    for spec in (Li(3), Union(2), Block(), BlockK(2), Ln(4), ModN(3)):
        assert spec_from_dict(spec.to_dict()) == spec
    ls = spec_from_dict({"language": "ls", "table": {"1": [[1, 2]]}})
    assert decide(ls, "abcc")


def test_spec_errors():
    with pytest.raises(LanguageError):
        spec_from_dict({"language": "nope"})
    with pytest.raises(LanguageError):
        spec_from_dict({"language": "union", "k": 0})
    with pytest.raises(LanguageError):
        spec_from_dict({"language": "ls", "table": {"1": [[0, 1]]}})
    with pytest.raises(LanguageError):
        spec_for_family("invalc")


def test_invalc_language():
    tm = demo_turing_machine()
    spec = Invalc(tm)
    assert decide(spec, "#")
    assert not decide(spec, valc_string(tm, "11"))


@pytest.mark.parametrize(
    "family, param, max_len",
    [
        ("multiple", 1, 8),
        ("multiple", 2, 8),
        ("multiple", 3, 8),
        ("multiple", 4, 8),
        ("union", 1, 8),
        ("union", 2, 8),
        ("block", None, 6),
        ("block_k", 1, 6),
        ("suffix_one", 1, 8),
        ("suffix_one", 2, 8),
        ("suffix_one", 3, 8),
        ("suffix_one", 4, 8),
        ("mod_n", 1, 8),
        ("mod_n", 2, 8),
        ("mod_n", 3, 8),
    ],
)
def test_family_matches_witness_language(family, param, max_len):
    pda = build_family(family, param)
    spec = spec_for_family(family, param)
    assert pda.input_alphabet == spec.alphabet
    for w in words(spec.alphabet, max_len):
        assert exact_accepts(pda, w) == decide(spec, w), w


@pytest.mark.slow
@pytest.mark.parametrize("family, param", [("block", None), ("block_k", 1)])
def test_block_families_to_length_eight(family, param):
    pda = build_family(family, param)
    spec = spec_for_family(family, param)
    for w in words(spec.alphabet, 8):
        assert exact_accepts(pda, w) == decide(spec, w), w


def test_long_block_word():
    w = "aaa#aaaaa#aa#bbbbb"
    assert decide(Block(), w)
    assert exact_accepts(block_pda(), w)
    assert not exact_accepts(block_pda(), w + "b")


@pytest.mark.parametrize("s", ["a#", "aa#", "aa#a#", "a#aa#", "a#a#"])
def test_block_s_tail_matches_relabeled_runs(s):
    pda = block_pda()
    relabeled = relabel_extension(pda, "b", "c")
    table = accepting_run_extensions(pda, s, "b", 3, 4)
    spec = BlockS({s: table.pair_set()})
    for i in range(0, 4):
        for m in range(1, 5 - i):
            w = s + "b" * i + "c" * m
            relabeled_accepts = bounded_accepts(relabeled, w) is Verdict.ACCEPT
            assert decide(spec, w) == relabeled_accepts, w
