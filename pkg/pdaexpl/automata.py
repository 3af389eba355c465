from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, FrozenSet, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

import networkx as nx

from .utils import DocumentError, dump_json, parse_json_document, read_json_document, save_document

logger = logging.getLogger(__name__)

EPSILON_LABEL = "ε"
MAX_PUSH = 2

Stack = Tuple[str, ...]


class AutomatonError(Exception):
    pass


class AlphabetMismatch(AutomatonError):
    pass


class ModeMismatch(AutomatonError):
    pass


class NotAStep(AutomatonError):
    pass


class InvalidRun(AutomatonError):
    pass


class DfaError(AutomatonError):
    pass


class PdaFormatError(AutomatonError):
    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None) -> None:
        super().__init__(message)
        self.line = line
        self.column = column

    def __str__(self) -> str:
        base = super().__str__()
        if self.line is None:
            return base
        return f"{base} (line {self.line}, column {self.column})"


def format_word(symbols: Sequence[str]) -> str:
    if not symbols:
        return EPSILON_LABEL
    if all(len(s) == 1 for s in symbols):
        return "".join(symbols)
    return " ".join(symbols)


@dataclass(frozen=True)
class Transition:
    source: str
    letter: Optional[str]
    pop: str
    target: str
    push: Stack = ()

    @property
    def is_epsilon(self) -> bool:
        return self.letter is None

    def sort_key(self) -> Tuple[Any, ...]:
        return (self.source, self.letter or "", self.pop, self.target, self.push)

    def label(self) -> str:
        return f"{self.letter or EPSILON_LABEL},{self.pop}/{format_word(self.push)}"

    def __str__(self) -> str:
        return f"{self.source} --{self.label()}--> {self.target}"


class Mode(NamedTuple):
    state: str
    top: Optional[str]


class IndexedMode(NamedTuple):
    state: str
    top: Optional[str]
    residue: int


@dataclass(frozen=True, order=True)
class Configuration:
    state: str
    stack: Stack

    @property
    def exhausted(self) -> bool:
        return not self.stack

    @property
    def height(self) -> int:
        return len(self.stack) - 1

    @property
    def top(self) -> Optional[str]:
        return self.stack[0] if self.stack else None

    @property
    def mode(self) -> Mode:
        return Mode(self.state, self.top)

    def apply(self, transition: Transition) -> "Configuration":
        return Configuration(transition.target, transition.push + self.stack[1:])

    def __str__(self) -> str:
        if not self.stack:
            return f"({self.state}, -)"
        return f"({self.state}, {format_word(self.stack)})"


@dataclass(frozen=True)
class Pda:
    states: FrozenSet[str]
    input_alphabet: FrozenSet[str]
    stack_alphabet: FrozenSet[str]
    transitions: Tuple[Transition, ...]
    initial_state: str
    initial_stack: str
    accepting: FrozenSet[str]

    @cached_property
    def _index(self) -> Dict[Tuple[str, Optional[str], str], Tuple[Transition, ...]]:
        buckets: Dict[Tuple[str, Optional[str], str], List[Transition]] = {}
        for t in self.transitions:
            buckets.setdefault((t.source, t.letter, t.pop), []).append(t)
        return {key: tuple(sorted(ts, key=Transition.sort_key)) for key, ts in buckets.items()}

    @cached_property
    def letters(self) -> Tuple[str, ...]:
        return tuple(sorted(self.input_alphabet))

    def initial_configuration(self) -> Configuration:
        return Configuration(self.initial_state, (self.initial_stack,))

    def enabled(self, config: Configuration, letter: Optional[str]) -> Tuple[Transition, ...]:
        if config.exhausted:
            return ()
        return self._index.get((config.state, letter, config.stack[0]), ())

    def outgoing(self, state: str, letter: Optional[str], top: str) -> Tuple[Transition, ...]:
        return self._index.get((state, letter, top), ())

    def is_accepting(self, config: Configuration) -> bool:
        return config.state in self.accepting

    def modes(self) -> List[Tuple[str, str]]:
        return [(q, x) for q in sorted(self.states) for x in sorted(self.stack_alphabet)]


TransitionLike = Union[Transition, Tuple[Any, ...]]


def _as_transition(raw: TransitionLike) -> Transition:
    if isinstance(raw, Transition):
        return raw
    source, letter, pop, target, push = raw
    if isinstance(push, str):
        push = tuple(push)
    return Transition(source, letter, pop, target, tuple(push))


def make_pda(
    transitions: Iterable[TransitionLike],
    initial_state: str,
    initial_stack: str,
    accepting: Iterable[str],
    states: Iterable[str] = (),
    input_alphabet: Iterable[str] = (),
    stack_alphabet: Iterable[str] = (),
) -> Pda:
    ts = sorted({_as_transition(t) for t in transitions}, key=Transition.sort_key)
    acc = frozenset(accepting)
    all_states = set(states) | {initial_state} | acc
    letters = set(input_alphabet)
    symbols = set(stack_alphabet) | {initial_stack}
    for t in ts:
        all_states.update((t.source, t.target))
        if t.letter is not None:
            letters.add(t.letter)
        symbols.add(t.pop)
        symbols.update(t.push)
    return Pda(
        states=frozenset(all_states),
        input_alphabet=frozenset(letters),
        stack_alphabet=frozenset(symbols),
        transitions=tuple(ts),
        initial_state=initial_state,
        initial_stack=initial_stack,
        accepting=acc,
    )


@dataclass(frozen=True)
class ValidationReport:
    violations: Tuple[str, ...]
    deterministic: bool
    epsilon_free: bool
    unreachable: Tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> Dict[str, Any]:
        return {
            "violations": list(self.violations),
            "deterministic": self.deterministic,
            "epsilon_free": self.epsilon_free,
            "unreachable": list(self.unreachable),
        }


def is_deterministic(pda: Pda) -> bool:
    for state, top in pda.modes():
        eps = pda.outgoing(state, None, top)
        if len(eps) > 1:
            return False
        for letter in pda.letters:
            moves = pda.outgoing(state, letter, top)
            if len(moves) > 1 or (eps and moves):
                return False
    return True


def validate(pda: Pda) -> ValidationReport:
    problems: List[str] = []
    if pda.initial_state not in pda.states:
        problems.append(f"initial state {pda.initial_state!r} is not declared")
    if pda.initial_stack not in pda.stack_alphabet:
        problems.append(f"initial stack symbol {pda.initial_stack!r} is not declared")
    for q in sorted(pda.accepting - pda.states):
        problems.append(f"accepting state {q!r} is not declared")
    for a in sorted(pda.input_alphabet):
        if not isinstance(a, str) or len(a) != 1:
            problems.append(f"letter {a!r} is not a single character")

    for t in sorted(pda.transitions, key=Transition.sort_key):
        if t.source not in pda.states:
            problems.append(f"{t}: source state is not declared")
        if t.target not in pda.states:
            problems.append(f"{t}: target state is not declared")
        if t.letter is not None and t.letter not in pda.input_alphabet:
            problems.append(f"{t}: letter is not in the input alphabet")
        if t.pop not in pda.stack_alphabet:
            problems.append(f"{t}: popped symbol is not in the stack alphabet")
        if len(t.push) > MAX_PUSH:
            problems.append(f"{t}: push length > {MAX_PUSH}")
        for x in t.push:
            if x not in pda.stack_alphabet:
                problems.append(f"{t}: pushed symbol {x!r} is not in the stack alphabet")

    unreachable: Tuple[str, ...] = ()
    if pda.initial_state in pda.states:
        graph = state_graph(pda)
        seen = nx.descendants(graph, pda.initial_state) | {pda.initial_state}
        unreachable = tuple(sorted(pda.states - seen))

    return ValidationReport(
        violations=tuple(problems),
        deterministic=is_deterministic(pda),
        epsilon_free=all(not t.is_epsilon for t in pda.transitions),
        unreachable=unreachable,
    )


def state_graph(pda: Pda) -> nx.MultiDiGraph:
    graph = nx.MultiDiGraph()
    for q in sorted(pda.states):
        graph.add_node(q, accepting=q in pda.accepting, initial=q == pda.initial_state)
    for t in sorted(pda.transitions, key=Transition.sort_key):
        graph.add_edge(t.source, t.target, label=t.label(), transition=t)
    return graph


def restrict(pda: Pda, state: str) -> Pda:
    graph = state_graph(pda)
    keep = nx.descendants(graph, state) | {state}
    ts = tuple(t for t in pda.transitions if t.source in keep)
    return Pda(
        states=frozenset(keep),
        input_alphabet=pda.input_alphabet,
        stack_alphabet=pda.stack_alphabet,
        transitions=ts,
        initial_state=state,
        initial_stack=pda.initial_stack,
        accepting=pda.accepting & keep,
    )


def size(pda: Pda) -> int:
    return len(pda.states) * len(pda.stack_alphabet)


def max_out_degree(pda: Pda) -> int:
    return max((len(ts) for ts in pda._index.values()), default=0)


@dataclass(frozen=True, eq=False)
class Dfa:
    states: FrozenSet[str]
    alphabet: FrozenSet[str]
    initial: str
    accepting: FrozenSet[str]
    delta: Mapping[Tuple[str, str], str] = field(default_factory=dict)

    def step(self, state: str, letter: str) -> str:
        return self.delta[(state, letter)]

    def run(self, word: str) -> str:
        state = self.initial
        for letter in word:
            state = self.step(state, letter)
        return state

    def accepts(self, word: str) -> bool:
        return self.run(word) in self.accepting


def make_dfa(
    states: Iterable[str],
    alphabet: Iterable[str],
    initial: str,
    accepting: Iterable[str],
    delta: Mapping[Tuple[str, str], str],
) -> Dfa:
    dfa = Dfa(frozenset(states), frozenset(alphabet), initial, frozenset(accepting), dict(delta))
    if dfa.initial not in dfa.states:
        raise DfaError(f"initial state {initial!r} is not declared")
    if not dfa.accepting <= dfa.states:
        raise DfaError("accepting states must be declared states")
    for q in sorted(dfa.states):
        for a in sorted(dfa.alphabet):
            target = dfa.delta.get((q, a))
            if target is None:
                raise DfaError(f"transition map is not total: missing ({q}, {a})")
            if target not in dfa.states:
                raise DfaError(f"transition ({q}, {a}) leads to undeclared state {target!r}")
    return dfa


def product_state(state: str, dfa_state: str) -> str:
    return f"({state},{dfa_state})"


def product_with_dfa(pda: Pda, dfa: Dfa) -> Pda:
    if pda.input_alphabet != dfa.alphabet:
        raise AlphabetMismatch(
            f"alphabets differ: pda has {sorted(pda.input_alphabet)}, dfa has {sorted(dfa.alphabet)}"
        )
    ts: List[Transition] = []
    for t in pda.transitions:
        for d in sorted(dfa.states):
            after = d if t.letter is None else dfa.step(d, t.letter)
            ts.append(Transition(product_state(t.source, d), t.letter, t.pop, product_state(t.target, after), t.push))
    states = frozenset(product_state(q, d) for q in pda.states for d in dfa.states)
    accepting = frozenset(product_state(q, d) for q in pda.accepting for d in dfa.accepting)
    logger.debug("product with dfa: %d states, %d transitions", len(states), len(ts))
    return Pda(
        states=states,
        input_alphabet=pda.input_alphabet,
        stack_alphabet=pda.stack_alphabet,
        transitions=tuple(sorted(ts, key=Transition.sort_key)),
        initial_state=product_state(pda.initial_state, dfa.initial),
        initial_stack=pda.initial_stack,
        accepting=accepting,
    )


def pda_to_dict(pda: Pda) -> Dict[str, Any]:
    return {
        "states": sorted(pda.states),
        "input_alphabet": sorted(pda.input_alphabet),
        "stack_alphabet": sorted(pda.stack_alphabet),
        "initial_state": pda.initial_state,
        "initial_stack_symbol": pda.initial_stack,
        "accepting": sorted(pda.accepting),
        "transitions": [
            {"from": t.source, "input": t.letter, "pop": t.pop, "to": t.target, "push": list(t.push)}
            for t in sorted(pda.transitions, key=Transition.sort_key)
        ],
    }


def _require(data: Dict[str, Any], key: str, where: str = "") -> Any:
    if key not in data:
        raise PdaFormatError(f"missing field {where}{key}")
    return data[key]


def _string_list(value: Any, name: str) -> List[str]:
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise PdaFormatError(f"field {name} must be an array of strings")
    return list(value)


def _string(value: Any, name: str) -> str:
    if not isinstance(value, str):
        raise PdaFormatError(f"field {name} must be a string")
    return value


def pda_from_dict(data: Dict[str, Any], check: bool = True) -> Pda:
    """Build a PDA from its document form; with check=False structural violations are left for validate()."""
    if not isinstance(data, dict):
        raise PdaFormatError("document must be an object")
    states = _string_list(_require(data, "states"), "states")
    letters = _string_list(_require(data, "input_alphabet"), "input_alphabet")
    symbols = _string_list(_require(data, "stack_alphabet"), "stack_alphabet")
    accepting = _string_list(_require(data, "accepting"), "accepting")
    initial_state = _string(_require(data, "initial_state"), "initial_state")
    initial_stack = _string(_require(data, "initial_stack_symbol"), "initial_stack_symbol")
    raw_transitions = _require(data, "transitions")
    if not isinstance(raw_transitions, list):
        raise PdaFormatError("field transitions must be an array")

    ts: List[Transition] = []
    for i, raw in enumerate(raw_transitions):
        where = f"transitions[{i}]."
        if not isinstance(raw, dict):
            raise PdaFormatError(f"transitions[{i}] must be an object")
        letter = _require(raw, "input", where)
        if letter is not None and not isinstance(letter, str):
            raise PdaFormatError(f"field {where}input must be a string or null")
        push = _string_list(_require(raw, "push", where), f"{where}push")
        ts.append(
            Transition(
                _string(_require(raw, "from", where), f"{where}from"),
                letter,
                _string(_require(raw, "pop", where), f"{where}pop"),
                _string(_require(raw, "to", where), f"{where}to"),
                tuple(push),
            )
        )

    pda = Pda(
        states=frozenset(states),
        input_alphabet=frozenset(letters),
        stack_alphabet=frozenset(symbols),
        transitions=tuple(sorted(set(ts), key=Transition.sort_key)),
        initial_state=initial_state,
        initial_stack=initial_stack,
        accepting=frozenset(accepting),
    )
    if check:
        report = validate(pda)
        if report.violations:
            raise PdaFormatError(report.violations[0])
    return pda


def loads_pda(text: str) -> Pda:
    try:
        return pda_from_dict(parse_json_document(text))
    except DocumentError as exc:
        raise PdaFormatError(str(exc.args[0]), exc.line, exc.column) from exc


def dumps_pda(pda: Pda) -> str:
    return dump_json(pda_to_dict(pda))


def load_pda(path: str, check: bool = True) -> Pda:
    try:
        data = read_json_document(path)
    except DocumentError as exc:
        raise PdaFormatError(f"{path}: {exc.args[0]}", exc.line, exc.column) from exc
    return pda_from_dict(data, check)


def save_pda(path: str, pda: Pda) -> bool:
    return save_document(path, pda_to_dict(pda))


def dfa_to_dict(dfa: Dfa) -> Dict[str, Any]:
    return {
        "states": sorted(dfa.states),
        "alphabet": sorted(dfa.alphabet),
        "initial": dfa.initial,
        "accepting": sorted(dfa.accepting),
        "transitions": [
            {"from": q, "input": a, "to": dfa.delta[(q, a)]}
            for q in sorted(dfa.states)
            for a in sorted(dfa.alphabet)
        ],
    }


def dfa_from_dict(data: Dict[str, Any]) -> Dfa:
    if not isinstance(data, dict):
        raise DfaError("document must be an object")
    try:
        delta = {(t["from"], t["input"]): t["to"] for t in data["transitions"]}
        return make_dfa(data["states"], data["alphabet"], data["initial"], data["accepting"], delta)
    except (KeyError, TypeError) as exc:
        raise DfaError(f"malformed dfa document: {exc}") from exc


def load_dfa(path: str) -> Dfa:
    try:
        return dfa_from_dict(read_json_document(path))
    except DocumentError as exc:
        raise DfaError(str(exc)) from exc
