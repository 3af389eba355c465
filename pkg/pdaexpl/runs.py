from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, Iterator, List, Optional, Set, Tuple

from .automata import (
    AlphabetMismatch,
    Configuration,
    IndexedMode,
    InvalidRun,
    ModeMismatch,
    NotAStep,
    Pda,
    Transition,
)

logger = logging.getLogger(__name__)

DEFAULT_EPS_BUDGET = 64


class Verdict(Enum):
    ACCEPT = "accept"
    REJECT = "reject"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Run:
    word: str
    configurations: Tuple[Configuration, ...]
    transitions: Tuple[Transition, ...]

    @property
    def consumed(self) -> Tuple[Optional[str], ...]:
        return tuple(t.letter for t in self.transitions)

    @property
    def final(self) -> Configuration:
        return self.configurations[-1]

    @property
    def heights(self) -> Tuple[int, ...]:
        return tuple(c.height for c in self.configurations)

    def letters_read_at(self) -> Tuple[int, ...]:
        counts = [0]
        for t in self.transitions:
            counts.append(counts[-1] + (0 if t.is_epsilon else 1))
        return tuple(counts)

    def __len__(self) -> int:
        return len(self.transitions)


@dataclass(frozen=True)
class LetterMove:
    target: Configuration
    path: Tuple[Transition, ...]
    via_accepting: bool

    @property
    def letter_step(self) -> Transition:
        return self.path[-1]


@dataclass(frozen=True)
class LetterMoves:
    moves: Tuple[LetterMove, ...]
    truncated: bool = False

    def __iter__(self) -> Iterator[LetterMove]:
        return iter(self.moves)

    def __len__(self) -> int:
        return len(self.moves)

    def targets(self) -> Tuple[Configuration, ...]:
        return tuple(m.target for m in self.moves)


@dataclass(frozen=True)
class Closure:
    configurations: Tuple[Configuration, ...]
    truncated: bool
    accepting: bool


@dataclass(frozen=True)
class RunSet:
    runs: Tuple[Run, ...]
    truncated: bool = False

    def __iter__(self) -> Iterator[Run]:
        return iter(self.runs)

    def __len__(self) -> int:
        return len(self.runs)


@dataclass(frozen=True, eq=False)
class ExtensionTable:
    word: str
    fill: str
    pairs: Dict[Tuple[int, int], Run] = field(default_factory=dict)
    truncated: bool = False

    def pair_set(self) -> FrozenSet[Tuple[int, int]]:
        return frozenset(self.pairs)


def _check_word(pda: Pda, word: str) -> None:
    stray = sorted(set(word) - pda.input_alphabet)
    if stray:
        raise AlphabetMismatch(f"letters {stray} are not in the input alphabet")


def read_letter(
    pda: Pda,
    config: Configuration,
    letter: str,
    eps_budget: int = DEFAULT_EPS_BUDGET,
    strict: bool = False,
) -> LetterMoves:
    if letter not in pda.input_alphabet:
        raise AlphabetMismatch(f"letter {letter!r} is not in the input alphabet")
    start_flag = pda.is_accepting(config)
    frontier: List[Tuple[Configuration, Tuple[Transition, ...], bool]] = [(config, (), start_flag)]
    seen: Set[Tuple[Configuration, bool]] = {(config, start_flag)}
    best: Dict[Configuration, LetterMove] = {}
    truncated = False
    depth = 0
    while frontier:
        following = []
        for c, path, flag in frontier:
            certifies = start_flag if strict else flag
            for t in pda.enabled(c, letter):
                target = c.apply(t)
                old = best.get(target)
                if old is None or (certifies and not old.via_accepting):
                    best[target] = LetterMove(target, path + (t,), certifies)
            for t in pda.enabled(c, None):
                nc = c.apply(t)
                nflag = flag or pda.is_accepting(nc)
                if (nc, True) in seen or (nc, nflag) in seen:
                    continue
                if depth >= eps_budget:
                    truncated = True
                    continue
                seen.add((nc, nflag))
                following.append((nc, path + (t,), nflag))
        frontier = following
        depth += 1
    if truncated:
        logger.debug("epsilon budget %d truncated reading %r from %s", eps_budget, letter, config)
    return LetterMoves(tuple(sorted(best.values(), key=lambda m: m.target)), truncated)


def epsilon_closure(pda: Pda, config: Configuration, eps_budget: int = DEFAULT_EPS_BUDGET) -> Closure:
    seen = {config}
    order = [config]
    frontier = [config]
    truncated = False
    depth = 0
    while frontier:
        following = []
        for c in frontier:
            for t in pda.enabled(c, None):
                nc = c.apply(t)
                if nc in seen:
                    continue
                if depth >= eps_budget:
                    truncated = True
                    continue
                seen.add(nc)
                order.append(nc)
                following.append(nc)
        frontier = following
        depth += 1
    return Closure(tuple(order), truncated, any(pda.is_accepting(c) for c in order))


def _epsilon_walks(
    pda: Pda, config: Configuration, eps_budget: int
) -> Tuple[List[Tuple[Tuple[Configuration, ...], Tuple[Transition, ...]]], bool]:
    walks = []
    truncated = False
    pending = [((config,), ())]
    while pending:
        configs, trans = pending.pop()
        walks.append((configs, trans))
        moves = pda.enabled(configs[-1], None)
        if not moves:
            continue
        if len(trans) >= eps_budget:
            truncated = True
            continue
        for t in reversed(moves):
            pending.append((configs + (configs[-1].apply(t),), trans + (t,)))
    return walks, truncated


def enumerate_runs(pda: Pda, word: str, eps_budget: int = DEFAULT_EPS_BUDGET) -> RunSet:
    _check_word(pda, word)
    partial = [((pda.initial_configuration(),), ())]
    truncated = False
    for letter in word:
        extended = []
        for configs, trans in partial:
            walks, cut = _epsilon_walks(pda, configs[-1], eps_budget)
            truncated = truncated or cut
            for wc, wt in walks:
                for t in pda.enabled(wc[-1], letter):
                    extended.append((configs + wc[1:] + (wc[-1].apply(t),), trans + wt + (t,)))
        partial = extended
        if not partial:
            break

    runs: List[Run] = []
    for configs, trans in partial:
        walks, cut = _epsilon_walks(pda, configs[-1], eps_budget)
        truncated = truncated or cut
        for wc, wt in walks:
            runs.append(Run(word, configs + wc[1:], trans + wt))
    return RunSet(tuple(runs), truncated)


def _simulate(pda: Pda, word: str, eps_budget: int) -> Tuple[Set[Configuration], bool]:
    _check_word(pda, word)
    current = {pda.initial_configuration()}
    truncated = False
    for letter in word:
        following: Set[Configuration] = set()
        for c in sorted(current):
            moves = read_letter(pda, c, letter, eps_budget)
            truncated = truncated or moves.truncated
            following.update(moves.targets())
        current = following
        if not current:
            break
    return current, truncated


def bounded_accepts(pda: Pda, word: str, eps_budget: int = DEFAULT_EPS_BUDGET) -> Verdict:
    current, truncated = _simulate(pda, word, eps_budget)
    for c in sorted(current):
        closure = epsilon_closure(pda, c, eps_budget)
        truncated = truncated or closure.truncated
        if closure.accepting:
            return Verdict.ACCEPT
    return Verdict.UNKNOWN if truncated else Verdict.REJECT


def bounded_accepts_empty_stack(pda: Pda, word: str, eps_budget: int = DEFAULT_EPS_BUDGET) -> Verdict:
    current, truncated = _simulate(pda, word, eps_budget)
    for c in sorted(current):
        closure = epsilon_closure(pda, c, eps_budget)
        truncated = truncated or closure.truncated
        if any(x.exhausted for x in closure.configurations):
            return Verdict.ACCEPT
    return Verdict.UNKNOWN if truncated else Verdict.REJECT


def check_run(pda: Pda, run: Run) -> None:
    configs = run.configurations
    if not configs or configs[0] != pda.initial_configuration():
        raise InvalidRun("run must start in the initial configuration")
    if len(configs) != len(run.transitions) + 1:
        raise InvalidRun("configuration and transition counts do not alternate")
    for i, t in enumerate(run.transitions):
        c = configs[i]
        if t not in pda.outgoing(t.source, t.letter, t.pop):
            raise InvalidRun(f"position {i}: {t} is not a transition of the automaton")
        if c.exhausted or c.state != t.source or c.top != t.pop:
            raise InvalidRun(f"position {i}: {t} is not enabled in {c}")
        if c.apply(t) != configs[i + 1]:
            raise InvalidRun(f"position {i}: applying {t} does not yield {configs[i + 1]}")
    read = "".join(t.letter for t in run.transitions if t.letter is not None)
    if read != run.word:
        raise InvalidRun(f"run reads {read!r}, expected {run.word!r}")


def is_valid_run(pda: Pda, run: Run) -> bool:
    try:
        check_run(pda, run)
    except InvalidRun:
        return False
    return True


def steps_of_run(run: Run) -> FrozenSet[int]:
    heights = run.heights
    steps = set()
    low = None
    for s in range(len(heights) - 1, -1, -1):
        if low is None or heights[s] <= low:
            steps.add(s)
            low = heights[s]
    return frozenset(steps)


def indexed_modes(run: Run, n: int) -> Dict[int, IndexedMode]:
    if n < 1:
        raise ValueError("period must be positive")
    read = run.letters_read_at()
    out = {}
    for s in sorted(steps_of_run(run)):
        c = run.configurations[s]
        out[s] = IndexedMode(c.state, c.top, read[s] % n)
    return out


def splice(run1: Run, s0: int, run2: Run, s1: int) -> Run:
    if s0 not in steps_of_run(run1):
        raise NotAStep(f"position {s0} is not a step of the first run")
    if s1 not in steps_of_run(run2):
        raise NotAStep(f"position {s1} is not a step of the second run")
    mode1 = run1.configurations[s0].mode
    mode2 = run2.configurations[s1].mode
    if mode1 != mode2:
        raise ModeMismatch(f"modes differ: {tuple(mode1)} vs {tuple(mode2)}")

    configs = list(run2.configurations[: s1 + 1])
    current = configs[-1]
    for t in run1.transitions[s0:]:
        if current.exhausted or current.state != t.source or current.top != t.pop:
            raise InvalidRun(f"cannot replay {t} on {current}")
        current = current.apply(t)
        configs.append(current)

    head = "".join(t.letter for t in run2.transitions[:s1] if t.letter is not None)
    tail = "".join(t.letter for t in run1.transitions[s0:] if t.letter is not None)
    return Run(head + tail, tuple(configs), run2.transitions[:s1] + run1.transitions[s0:])


def accepted_prefix_lengths(pda: Pda, run: Run) -> FrozenSet[int]:
    read = run.letters_read_at()
    return frozenset(read[s] for s, c in enumerate(run.configurations) if pda.is_accepting(c))


def accepting_run_extensions(
    pda: Pda,
    word: str,
    fill: str,
    max_i: int,
    max_j: int,
    eps_budget: int = DEFAULT_EPS_BUDGET,
) -> ExtensionTable:
    if fill not in pda.input_alphabet:
        raise AlphabetMismatch(f"fill letter {fill!r} is not in the input alphabet")
    pairs: Dict[Tuple[int, int], Run] = {}
    truncated = False
    base = len(word)
    for j in range(1, max_j + 1):
        runs = enumerate_runs(pda, word + fill * j, eps_budget)
        truncated = truncated or runs.truncated
        for run in runs:
            if not pda.is_accepting(run.final):
                continue
            lengths = accepted_prefix_lengths(pda, run)
            for i in range(0, min(j - 1, max_i) + 1):
                if base + i in lengths and (i, j) not in pairs:
                    pairs[(i, j)] = run
    logger.debug("extension table for %r/%r: %d pairs", word, fill, len(pairs))
    return ExtensionTable(word, fill, pairs, truncated)
