from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, FrozenSet, List, Mapping, Optional, Tuple, Union

from .utils import DocumentError, read_json_document, save_document

SEPARATOR = "#"
LEFT = "L"
RIGHT = "R"
DEFAULT_MAX_STEPS = 1000

Action = Tuple[str, str, str]


class TuringError(Exception):
    pass


class TmFormatError(TuringError):
    pass


@dataclass(frozen=True, eq=False)
class TuringMachine:
    states: FrozenSet[str]
    input_alphabet: FrozenSet[str]
    tape_alphabet: FrozenSet[str]
    blank: str
    delta: Mapping[Tuple[str, str], Action]
    start: str
    accept: str
    reject: str

    @property
    def halting(self) -> FrozenSet[str]:
        return frozenset((self.accept, self.reject))

    @property
    def running(self) -> FrozenSet[str]:
        return self.states - self.halting


@dataclass(frozen=True)
class TmConfiguration:
    left: str
    state: str
    head: str
    right: str

    @property
    def position(self) -> int:
        return len(self.left)

    def encode(self) -> str:
        return self.left + self.state + self.head + self.right

    def __str__(self) -> str:
        return self.encode()


class Halted:
    _instance: Optional["Halted"] = None

    def __new__(cls) -> "Halted":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "HALTED"


HALTED = Halted()


def machine_problems(tm: TuringMachine) -> List[str]:
    problems = []
    if tm.accept == tm.reject:
        problems.append("accept and reject states must differ")
    for name, state in (("start", tm.start), ("accept", tm.accept), ("reject", tm.reject)):
        if state not in tm.states:
            problems.append(f"{name} state {state!r} is not declared")
    if tm.start in tm.halting:
        problems.append("start state must not be halting")
    if tm.blank not in tm.tape_alphabet:
        problems.append("blank must belong to the tape alphabet")
    if tm.blank in tm.input_alphabet:
        problems.append("blank must not belong to the input alphabet")
    if not tm.input_alphabet <= tm.tape_alphabet:
        problems.append("input alphabet must be contained in the tape alphabet")
    for q in sorted(tm.running):
        for a in sorted(tm.tape_alphabet):
            action = tm.delta.get((q, a))
            if action is None:
                problems.append(f"delta is not total: missing ({q}, {a})")
                continue
            nxt, write, move = action
            if nxt not in tm.states or write not in tm.tape_alphabet or move not in (LEFT, RIGHT):
                problems.append(f"delta ({q}, {a}) -> {action} is malformed")
    return problems


def make_machine(
    states,
    input_alphabet,
    tape_alphabet,
    blank: str,
    delta: Mapping[Tuple[str, str], Action],
    start: str,
    accept: str,
    reject: str,
) -> TuringMachine:
    tm = TuringMachine(
        frozenset(states),
        frozenset(input_alphabet),
        frozenset(tape_alphabet),
        blank,
        dict(delta),
        start,
        accept,
        reject,
    )
    problems = machine_problems(tm)
    if problems:
        raise TuringError(problems[0])
    return tm


def trim_window(conf: TmConfiguration, blank: str) -> TmConfiguration:
    """Shrink a configuration to the smallest tape window holding the head and every non-blank cell."""
    return TmConfiguration(conf.left.lstrip(blank), conf.state, conf.head, conf.right.rstrip(blank))


def initial_configuration(tm: TuringMachine, x: str) -> TmConfiguration:
    if x:
        return TmConfiguration("", tm.start, x[0], x[1:])
    return TmConfiguration("", tm.start, tm.blank, "")


def tm_step(tm: TuringMachine, conf: TmConfiguration) -> Union[TmConfiguration, Halted]:
    if conf.state in tm.halting:
        return HALTED
    nxt, write, move = tm.delta[(conf.state, conf.head)]
    if move == RIGHT:
        if conf.right:
            moved = TmConfiguration(conf.left + write, nxt, conf.right[0], conf.right[1:])
        else:
            moved = TmConfiguration(conf.left + write, nxt, tm.blank, "")
    elif conf.left:
        moved = TmConfiguration(conf.left[:-1], nxt, conf.left[-1], write + conf.right)
    else:
        # left edge: the window grows by a blank cell under the head
        moved = TmConfiguration("", nxt, tm.blank, write + conf.right)
    return trim_window(moved, tm.blank)


def run_machine(tm: TuringMachine, x: str, max_steps: int = DEFAULT_MAX_STEPS) -> Tuple[List[TmConfiguration], bool]:
    confs = [initial_configuration(tm, x)]
    for _ in range(max_steps):
        nxt = tm_step(tm, confs[-1])
        if nxt is HALTED:
            return confs, True
        confs.append(nxt)
    return confs, confs[-1].state in tm.halting


def reverse(word: str) -> str:
    return word[::-1]


def encoding_alphabet(tm: TuringMachine) -> FrozenSet[str]:
    return frozenset({SEPARATOR}) | tm.tape_alphabet | tm.states


def encode_computation(confs: List[TmConfiguration]) -> str:
    ids = [c.encode() if i % 2 == 0 else reverse(c.encode()) for i, c in enumerate(confs)]
    return SEPARATOR + SEPARATOR.join(ids) + SEPARATOR


def valc_string(tm: TuringMachine, x: str, max_steps: int = DEFAULT_MAX_STEPS) -> Optional[str]:
    confs, halted = run_machine(tm, x, max_steps)
    if not halted:
        return None
    last = len(confs) - 1
    if last % 2 or last < 4:
        return None
    return encode_computation(confs)


def parse_id(tm: TuringMachine, text: str) -> Optional[TmConfiguration]:
    marks = [i for i, ch in enumerate(text) if ch in tm.states]
    if len(marks) != 1:
        return None
    at = marks[0]
    if at + 1 >= len(text):
        return None
    if any(ch not in tm.tape_alphabet for i, ch in enumerate(text) if i != at):
        return None
    return TmConfiguration(text[:at], text[at], text[at + 1], text[at + 2 :])


def _is_initial(tm: TuringMachine, conf: TmConfiguration) -> bool:
    if conf.left or conf.state != tm.start:
        return False
    tape = conf.head + conf.right
    if conf.head == tm.blank:
        return not conf.right
    return all(ch in tm.input_alphabet for ch in tape)


def parse_computation(tm: TuringMachine, s: str) -> Optional[List[TmConfiguration]]:
    if len(s) < 2 or s[0] != SEPARATOR or s[-1] != SEPARATOR:
        return None
    ids = s[1:-1].split(SEPARATOR)
    last = len(ids) - 1
    if last % 2 or last < 4:
        return None
    confs = []
    for i, text in enumerate(ids):
        conf = parse_id(tm, text if i % 2 == 0 else reverse(text))
        if conf is None:
            return None
        confs.append(conf)
    if not _is_initial(tm, confs[0]):
        return None
    if confs[-1].state not in tm.halting:
        return None
    for before, after in zip(confs, confs[1:]):
        if tm_step(tm, before) != after:
            return None
    return confs


def invalc_oracle(tm: TuringMachine, s: str) -> bool:
    return parse_computation(tm, s) is None


def tm_to_dict(tm: TuringMachine) -> Dict[str, Any]:
    return {
        "states": sorted(tm.states),
        "input_alphabet": sorted(tm.input_alphabet),
        "tape_alphabet": sorted(tm.tape_alphabet),
        "blank": tm.blank,
        "delta": [
            {"state": q, "read": a, "next": nxt, "write": write, "move": move}
            for (q, a), (nxt, write, move) in sorted(tm.delta.items())
        ],
        "start": tm.start,
        "accept": tm.accept,
        "reject": tm.reject,
    }


def tm_from_dict(data: Dict[str, Any]) -> TuringMachine:
    if not isinstance(data, dict):
        raise TmFormatError("document must be an object")
    try:
        delta = {(e["state"], e["read"]): (e["next"], e["write"], e["move"]) for e in data["delta"]}
        return make_machine(
            data["states"],
            data["input_alphabet"],
            data["tape_alphabet"],
            data["blank"],
            delta,
            data["start"],
            data["accept"],
            data["reject"],
        )
    except (KeyError, TypeError) as exc:
        raise TmFormatError(f"malformed machine document: missing or invalid field {exc}") from exc
    except TuringError as exc:
        raise TmFormatError(str(exc)) from exc


def load_tm(path: str) -> TuringMachine:
    try:
        return tm_from_dict(read_json_document(path))
    except DocumentError as exc:
        raise TmFormatError(str(exc)) from exc


def save_tm(path: str, tm: TuringMachine) -> bool:
    return save_document(path, tm_to_dict(tm))
