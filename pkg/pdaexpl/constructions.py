from __future__ import annotations

import logging
from collections import deque
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .automata import (
    AlphabetMismatch,
    Dfa,
    Pda,
    Transition,
    make_dfa,
    make_pda,
    product_with_dfa,
)
from .turing import (
    LEFT,
    RIGHT,
    SEPARATOR,
    TuringMachine,
    encoding_alphabet,
    make_machine,
)

logger = logging.getLogger(__name__)

BOTTOM = "⊥"
BITS = ("0", "1")
FAMILIES = ("multiple", "union", "block", "block_k", "suffix_one", "mod_n", "invalc")

IDLE = "idle"
ACCEPT = "accept"
DUMMY = "dummy"
START = "start"
PREFIX = "prefix"
CLEAR = "clear"
BOUNDARY = "boundary"
COUNT = "count"
SINK = "sink"


class ConstructionError(Exception):
    pass


class LetterClash(ConstructionError):
    pass


class EncodingOverflow(ConstructionError):
    pass


class PdaBuilder:
    """Collects transitions and compiles pushes longer than two symbols into epsilon chains."""

    def __init__(self, initial_state: str, initial_stack: str, letters: Iterable[str] = (), stack_symbols: Iterable[str] = ()):
        self.initial_state = initial_state
        self.initial_stack = initial_stack
        self.states: Set[str] = {initial_state}
        self.accepting: Set[str] = set()
        self.letters: Set[str] = set(letters)
        self.symbols: Set[str] = set(stack_symbols) | {initial_stack}
        self.transitions: Set[Transition] = set()
        self._chains: Dict[str, str] = {}

    def state(self, name: str, accepting: bool = False) -> str:
        self.states.add(name)
        if accepting:
            self.accepting.add(name)
        return name

    def add(self, source: str, letter: Optional[str], pop: str, target: str, push: Sequence[str] = ()) -> None:
        push = tuple(push)
        self.states.update((source, target))
        self.symbols.add(pop)
        self.symbols.update(push)
        if letter is not None:
            self.letters.add(letter)
        if len(push) <= 2:
            self.transitions.add(Transition(source, letter, pop, target, push))
            return
        p = len(push)
        first = self._chain(target, push[: p - 1])
        self.transitions.add(Transition(source, letter, pop, first, push[p - 2 :]))
        for j in range(p - 3, -1, -1):
            here = self._chain(target, push[: j + 2])
            after = target if j == 0 else self._chain(target, push[: j + 1])
            self.transitions.add(Transition(here, None, push[j + 1], after, (push[j], push[j + 1])))

    def _chain(self, target: str, word: Sequence[str]) -> str:
        name = f"{target}@{'/'.join(word)}"
        self.states.add(name)
        self._chains[name] = target
        return name

    def build(self) -> Pda:
        accepting = set(self.accepting)
        accepting.update(c for c, t in self._chains.items() if t in self.accepting)
        return make_pda(
            self.transitions,
            self.initial_state,
            self.initial_stack,
            accepting,
            states=self.states,
            input_alphabet=self.letters,
            stack_alphabet=self.symbols,
        )


def _require_positive(name: str, value: int) -> None:
    if not isinstance(value, int) or value < 1:
        raise ConstructionError(f"{name} must be a positive integer, got {value!r}")


def _add_multiple(b: PdaBuilder, i: int, prefix: str = "") -> str:
    q0, qa, qb, qf = (prefix + s for s in ("q0", "qa", "qb", "qf"))
    b.state(q0, accepting=True)
    b.state(qf, accepting=True)
    b.add(q0, "a", "Z", qa, ("X",) * i + ("Z",))
    b.add(qa, "a", "X", qa, ("X",) * (i + 1))
    b.add(qa, "b", "X", qb)
    b.add(qb, "b", "X", qb)
    b.add(qb, None, "Z", qf, ("Z",))
    return q0


def multiple_dpda(i: int) -> Pda:
    _require_positive("i", i)
    b = PdaBuilder("q0", "Z", letters="ab")
    _add_multiple(b, i)
    return b.build()


def union_pda(k: int) -> Pda:
    _require_positive("k", k)
    b = PdaBuilder("u", "Z", letters="ab")
    b.state("u", accepting=True)
    for i in range(1, k + 2):
        entry = _add_multiple(b, i, prefix=f"d{i}.")
        b.add("u", None, "Z", entry, ("Z",))
    return b.build()


def block_pda() -> Pda:
    b = PdaBuilder("skip", "Z", letters="a#b", stack_symbols="ZA")
    b.state("empty", accepting=True)
    b.state(ACCEPT, accepting=True)
    for here, mid, top in (("skip", "skip_mid", "Z"), ("after", "after_mid", "A"), ("empty", "empty_mid", "Z")):
        b.add(here, "a", top, mid, (top,))
        b.add(here, "#", top, here, (top,))
        b.add(mid, "a", top, mid, (top,))
        b.add(mid, "#", top, here, (top,))
    b.add("skip", None, "Z", "store", ("Z",))
    b.add("store", "a", "Z", "store", ("A", "Z"))
    b.add("store", "a", "A", "store", ("A", "A"))
    b.add("store", "#", "Z", "empty", ("Z",))
    b.add("store", "#", "A", "after", ("A",))
    b.add("after", "b", "A", COUNT)
    b.add(COUNT, "b", "A", COUNT)
    b.add(COUNT, None, "Z", ACCEPT, ("Z",))
    return b.build()


def block_region_dfa(k: int) -> Dfa:
    """DFA for (a*#)^(k+1) b*."""
    _require_positive("k", k)
    letters = ("a", "#", "b")
    delta: Dict[Tuple[str, str], str] = {}
    for m in range(k + 1):
        delta[(f"r{m}", "a")] = f"r{m}"
        delta[(f"r{m}", "#")] = f"r{m + 1}"
        delta[(f"r{m}", "b")] = "dead"
    last = f"r{k + 1}"
    delta[(last, "a")] = delta[(last, "#")] = "dead"
    delta[(last, "b")] = "tail"
    delta[("tail", "b")] = "tail"
    delta[("tail", "a")] = delta[("tail", "#")] = "dead"
    for a in letters:
        delta[("dead", a)] = "dead"
    states = {q for q, _ in delta}
    return make_dfa(states, letters, "r0", {last, "tail"}, delta)


def block_k_pda(k: int) -> Pda:
    return product_with_dfa(block_pda(), block_region_dfa(k))


def _fresh_suffix(states: Iterable[str]) -> str:
    taken = set(states)
    suffix = "'"
    while any(q + suffix in taken for q in taken):
        suffix += "'"
    return suffix


def relabel_extension(pda: Pda, b: str, c: str) -> Pda:
    if c in pda.input_alphabet:
        raise LetterClash(f"letter {c!r} already belongs to the input alphabet")
    if b not in pda.input_alphabet:
        raise AlphabetMismatch(f"letter {b!r} is not in the input alphabet")
    suffix = _fresh_suffix(pda.states)
    ts: List[Transition] = list(pda.transitions)
    for f in sorted(pda.accepting):
        for x in sorted(pda.stack_alphabet):
            ts.append(Transition(f, None, x, f + suffix, (x,)))
    for t in pda.transitions:
        if t.letter is None:
            ts.append(Transition(t.source + suffix, None, t.pop, t.target + suffix, t.push))
        elif t.letter == b:
            ts.append(Transition(t.source + suffix, c, t.pop, t.target + suffix, t.push))
    return make_pda(
        ts,
        pda.initial_state,
        pda.initial_stack,
        {f + suffix for f in pda.accepting},
        states=pda.states | {q + suffix for q in pda.states},
        input_alphabet=pda.input_alphabet | {c},
        stack_alphabet=pda.stack_alphabet,
    )


def counter_load(value: int) -> Tuple[str, ...]:
    """Binary value, least significant bit on top, above the bottom marker."""
    bits = tuple(reversed(format(value, "b"))) if value else ()
    return bits + (BOTTOM,)


def _add_counter(b: PdaBuilder, count: str, width: int, on_zero: Optional[str]) -> None:
    for x in BITS:
        if on_zero is not None:
            b.add(count, x, BOTTOM, on_zero, (BOTTOM,))
        if width:
            b.add(count, x, "1", count, ("0",))
            b.add(count, x, "0", f"{count}.zero1")
    for m in range(1, width + 1):
        zero = f"{count}.zero{m}"
        refill = f"{count}.refill{m}"
        if m < width:
            b.add(zero, None, "0", f"{count}.zero{m + 1}")
        b.add(zero, None, "1", refill, ("0",))
        if on_zero is not None:
            b.add(zero, None, BOTTOM, on_zero, (BOTTOM,))
        after = count if m == 1 else f"{count}.refill{m - 1}"
        for y in BITS:
            b.add(refill, None, y, after, ("1", y))


def suffix_one_pda(n: int) -> Pda:
    _require_positive("n", n)
    b = PdaBuilder(IDLE, BOTTOM, letters=BITS, stack_symbols=BITS)
    b.state(ACCEPT, accepting=True)
    b.state(DUMMY)
    for x in BITS:
        b.add(IDLE, x, BOTTOM, IDLE, (BOTTOM,))
    for done in (ACCEPT, DUMMY):
        b.add(done, None, BOTTOM, IDLE, (BOTTOM,))
    if n == 1:
        b.add(IDLE, "1", BOTTOM, ACCEPT, (BOTTOM,))
        b.add(IDLE, "0", BOTTOM, DUMMY, (BOTTOM,))
        return b.build()
    value = n - 2
    for x in BITS:
        count = f"{COUNT}{x}"
        b.add(IDLE, x, BOTTOM, count, counter_load(value))
        _add_counter(b, count, value.bit_length(), ACCEPT if x == "1" else DUMMY)
    pda = b.build()
    logger.debug("suffix_one_pda(%d): %d states", n, len(pda.states))
    return pda


def mod_pda(n: int) -> Pda:
    _require_positive("n", n)
    if n == 1:
        b = PdaBuilder(BOUNDARY, BOTTOM, letters=BITS, stack_symbols=BITS)
        b.state(BOUNDARY, accepting=True)
        b.add(BOUNDARY, "1", BOTTOM, BOUNDARY, (BOTTOM,))
        return b.build()
    value = n - 2
    width = value.bit_length()
    b = PdaBuilder(START, BOTTOM, letters=BITS, stack_symbols=BITS)
    for q in (START, PREFIX, BOUNDARY):
        b.state(q, accepting=True)
    b.add(START, None, BOTTOM, BOUNDARY, (BOTTOM,))
    for x in BITS:
        b.add(START, x, BOTTOM, PREFIX, counter_load(value))
    _add_counter(b, PREFIX, width, None)
    b.add(PREFIX, None, BOTTOM, BOUNDARY, (BOTTOM,))
    for x in BITS:
        b.add(PREFIX, None, x, CLEAR)
        b.add(CLEAR, None, x, CLEAR)
    b.add(CLEAR, None, BOTTOM, BOUNDARY, (BOTTOM,))
    b.add(BOUNDARY, "1", BOTTOM, COUNT, counter_load(value))
    _add_counter(b, COUNT, width, BOUNDARY)
    return b.build()


def check_encoding(tm: TuringMachine) -> None:
    symbols = tm.tape_alphabet | tm.states
    if SEPARATOR in symbols:
        raise EncodingOverflow(f"separator {SEPARATOR!r} collides with a machine symbol")
    if BOTTOM in symbols:
        raise EncodingOverflow(f"stack marker {BOTTOM!r} collides with a machine symbol")
    if tm.tape_alphabet & tm.states:
        raise EncodingOverflow("tape symbols and states must be disjoint")
    long_symbols = sorted(s for s in symbols if len(s) != 1)
    if long_symbols:
        raise EncodingOverflow(f"symbols must be single characters: {long_symbols}")


def valc_shape_dfa(tm: TuringMachine) -> Dfa:
    """DFA for the regular conditions on #C0#C1#...#CN#: shape, initial and halting IDs, reversal of odd IDs."""
    check_encoding(tm)
    tape = sorted(tm.tape_alphabet)
    inputs = sorted(tm.input_alphabet)
    running = sorted(tm.running)
    halting = sorted(tm.halting)
    delta: Dict[Tuple[str, str], str] = {}

    def arc(source: str, letters: Iterable[str], target: str) -> None:
        for letter in letters:
            delta[(source, letter)] = target

    arc("start", [SEPARATOR], "c0.state")
    arc("c0.state", [tm.start], "c0.head")
    arc("c0.head", inputs, "c0.input")
    arc("c0.head", [tm.blank], "c0.blank")
    arc("c0.input", inputs, "c0.input")
    arc("c0.input", [SEPARATOR], "r1.empty")
    arc("c0.blank", [SEPARATOR], "r1.empty")
    for r, nxt in (("r1", "f2"), ("r3", "f4"), ("r5", "f4")):
        arc(f"{r}.empty", tape, f"{r}.pre")
        arc(f"{r}.pre", tape, f"{r}.pre")
        arc(f"{r}.pre", running, f"{r}.post")
        arc(f"{r}.post", tape, f"{r}.post")
        arc(f"{r}.post", [SEPARATOR], f"{nxt}.pre")
    for f, nxt in (("f2", "r3"), ("f4", "r5")):
        arc(f"{f}.pre", tape, f"{f}.pre")
        arc(f"{f}.pre", running, f"{f}.head")
        arc(f"{f}.head", tape, f"{f}.post")
        arc(f"{f}.post", tape, f"{f}.post")
        arc(f"{f}.post", [SEPARATOR], f"{nxt}.empty")
    arc("f4.pre", halting, "f4.hhead")
    arc("f4.hhead", tape, "f4.hpost")
    arc("f4.hpost", tape, "f4.hpost")
    arc("f4.hpost", [SEPARATOR], "final")

    letters = sorted(encoding_alphabet(tm))
    states = {q for q, _ in delta} | set(delta.values()) | {"final", "dead"}
    for q in states:
        for a in letters:
            delta.setdefault((q, a), "dead")
    return make_dfa(states, letters, "start", {"final"}, delta)


CheckerState = Tuple[str, ...]


def _push(top: str, symbols: Sequence[str]) -> Tuple[str, ...]:
    return tuple(reversed(symbols)) + (top,)


def _checker_step(
    tm: TuringMachine, even: bool, t: CheckerState, letter: str, top: str
) -> Optional[Tuple[CheckerState, Tuple[str, ...]]]:
    keep = (top,)
    kind = t[0]
    if kind == "lead":
        return (("f0",) if even else ("skip",)), keep
    if kind == "skip":
        return (("b0",) if letter == SEPARATOR else ("skip",)), keep
    if kind == "cmp":
        if letter == SEPARATOR:
            if top != BOTTOM:
                return None
            return (("f0",) if even else ("b0",)), keep
        if top != letter:
            return None
        return ("cmp",), ()
    if kind == "halted":
        return (("cmp",) if letter == SEPARATOR else ("halted",)), keep
    if kind in ("fcopy", "bcopy"):
        if letter == SEPARATOR:
            return ("cmp",), keep
        return (kind,), _push(top, [letter])

    # successor of an even ID, read forward
    if kind == "f0":
        if letter in tm.states:
            return ("fq", "", letter), keep
        return ("f1", letter), keep
    if kind == "f1":
        if letter in tm.states:
            return ("fq", t[1], letter), keep
        return ("f1", letter), _push(top, [t[1]])
    if kind == "fq":
        held, state = t[1], t[2]
        if state in tm.halting:
            return ("halted",), keep
        nxt, write, move = tm.delta[(state, letter)]
        if move == RIGHT:
            if not held and write == tm.blank:
                return ("fr",), _push(top, [nxt])
            return ("fr",), _push(top, ([held] if held else []) + [write, nxt])
        moved = [nxt, held or tm.blank]
        if write == tm.blank:
            return ("fl",), _push(top, moved)
        return ("fcopy",), _push(top, moved + [write])
    if kind == "fl":
        # a written blank stays only when more tape follows it
        if letter == SEPARATOR:
            return ("cmp",), keep
        return ("fcopy",), _push(top, [tm.blank, letter])
    if kind == "fr":
        if letter == SEPARATOR:
            return ("cmp",), _push(top, [tm.blank])
        return ("fcopy",), _push(top, [letter])

    # successor of an odd ID, read reversed and pushed reversed
    if kind == "b0":
        return ("b1", letter, ""), keep
    if kind == "b1":
        held, wrote = t[1], t[2]
        if letter not in tm.states:
            return ("b1", letter, "w"), _push(top, [held])
        if letter in tm.halting:
            return ("halted",), keep
        nxt, write, move = tm.delta[(letter, held)]
        if move == RIGHT:
            moved = ([] if wrote else [tm.blank]) + [nxt]
            if write == tm.blank:
                return ("bw",), _push(top, moved)
            return ("bcopy",), _push(top, moved + [write])
        if not wrote and write == tm.blank:
            return ("bl", nxt), keep
        return ("bl", nxt), _push(top, [write])
    if kind == "bw":
        if letter == SEPARATOR:
            return ("cmp",), keep
        return ("bcopy",), _push(top, [tm.blank, letter])
    if kind == "bl":
        if letter == SEPARATOR:
            return ("cmp",), _push(top, [tm.blank, t[1]])
        return ("bcopy",), _push(top, [letter, t[1]])
    raise ConstructionError(f"unknown checker state {t!r}")


def _checker_branch(
    b: PdaBuilder, tm: TuringMachine, dfa: Dfa, even: bool, letters: Sequence[str], symbols: Sequence[str]
) -> str:
    branch = "even" if even else "odd"

    def name(t: CheckerState, d: str) -> str:
        return f"{branch}|{'.'.join(t)}|{d}"

    start = (("lead",), dfa.initial)
    seen = {start}
    queue = deque([start])
    while queue:
        t, d = queue.popleft()
        source = b.state(name(t, d), accepting=d != "final")
        for letter in letters:
            d2 = dfa.step(d, letter)
            for top in symbols:
                step = None if d2 == "dead" else _checker_step(tm, even, t, letter, top)
                if step is None:
                    b.add(source, letter, top, SINK, (top,))
                    continue
                t2, push = step
                b.add(source, letter, top, name(t2, d2), push)
                if (t2, d2) not in seen:
                    seen.add((t2, d2))
                    queue.append((t2, d2))
    logger.debug("%s checker branch: %d product states", branch, len(seen))
    return name(*start)


def invalc_pda(tm: TuringMachine) -> Pda:
    dfa = valc_shape_dfa(tm)
    letters = sorted(dfa.alphabet)
    symbols = [BOTTOM] + sorted(tm.tape_alphabet) + sorted(tm.states)
    b = PdaBuilder("init", BOTTOM, letters=letters, stack_symbols=symbols)

    for d in sorted(dfa.states):
        b.state(f"reg|{d}", accepting=d not in dfa.accepting)
        for letter in letters:
            b.add(f"reg|{d}", letter, BOTTOM, f"reg|{dfa.step(d, letter)}", (BOTTOM,))
    b.state(SINK, accepting=True)
    for letter in letters:
        for top in symbols:
            b.add(SINK, letter, top, SINK, (top,))

    entries = [f"reg|{dfa.initial}"]
    entries.append(_checker_branch(b, tm, dfa, True, letters, symbols))
    entries.append(_checker_branch(b, tm, dfa, False, letters, symbols))
    for entry in entries:
        b.add("init", None, BOTTOM, entry, (BOTTOM,))
    pda = b.build()
    logger.debug("invalc_pda: %d states, %d transitions", len(pda.states), len(pda.transitions))
    return pda


def invalc_branches(pda: Pda) -> List[str]:
    return [t.target for t in pda.outgoing(pda.initial_state, None, pda.initial_stack)]


def demo_turing_machine() -> TuringMachine:
    """Machine over {1} halting after exactly four steps on inputs of length at most two."""
    delta = {
        ("p", "1"): ("q", "1", RIGHT),
        ("p", "_"): ("q", "1", RIGHT),
        ("q", "1"): ("r", "1", RIGHT),
        ("q", "_"): ("r", "1", RIGHT),
        ("r", "1"): ("p", "1", RIGHT),
        ("r", "_"): ("s", "_", LEFT),
        ("s", "1"): ("A", "1", RIGHT),
        ("s", "_"): ("R", "_", RIGHT),
    }
    return make_machine("pqrsAR", "1", "1_", "_", delta, "p", "A", "R")


def quick_turing_machine() -> TuringMachine:
    delta = {
        ("p", "1"): ("q", "1", RIGHT),
        ("p", "_"): ("q", "_", RIGHT),
        ("q", "1"): ("A", "1", RIGHT),
        ("q", "_"): ("A", "_", RIGHT),
    }
    return make_machine("pqAR", "1", "1_", "_", delta, "p", "A", "R")


def build_family(family: str, param: Optional[int] = None, tm: Optional[TuringMachine] = None) -> Pda:
    if family == "multiple":
        return multiple_dpda(_param(family, param))
    if family == "union":
        return union_pda(_param(family, param))
    if family == "block":
        return block_pda()
    if family == "block_k":
        return block_k_pda(_param(family, param))
    if family == "suffix_one":
        return suffix_one_pda(_param(family, param))
    if family == "mod_n":
        return mod_pda(_param(family, param))
    if family == "invalc":
        return invalc_pda(tm or demo_turing_machine())
    raise ConstructionError(f"unknown family {family!r}; expected one of {', '.join(FAMILIES)}")


def _param(family: str, param: Optional[int]) -> int:
    if param is None:
        raise ConstructionError(f"family {family} needs a parameter")
    return param


def needs_param(family: str) -> bool:
    return family in ("multiple", "union", "block_k", "suffix_one", "mod_n")


