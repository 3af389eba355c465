from __future__ import annotations

import itertools
import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, Iterable, Iterator, List, Mapping, NamedTuple, Optional, Sequence, Tuple

from .automata import Configuration, Pda, format_word, max_out_degree
from .constructions import BOUNDARY, IDLE
from .grammar import exact_membership
from .runs import DEFAULT_EPS_BUDGET, Closure, LetterMove, LetterMoves, epsilon_closure, read_letter

logger = logging.getLogger(__name__)

Membership = Callable[[str], Optional[bool]]
Tokens = Tuple[Configuration, ...]
Seats = Tuple[Optional[Configuration], ...]
Pick = Optional[LetterMove]

HUMAN_ROLES = ("spoiler", "determiner")
QUIT = "quit"
DEFAULT_INTERACTIVE_HORIZON = 8


class GameError(Exception):
    pass


class IllegalMove(GameError):
    pass


class Winner(Enum):
    DETERMINER = "determiner"
    SPOILER = "spoiler"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Ply:
    letter: str
    tokens: Seats


@dataclass(frozen=True)
class GameOutcome:
    winner: Winner
    k: int
    horizon: int
    witness: Optional[str] = None
    losing_prefix: Optional[str] = None
    principal_variation: Tuple[Ply, ...] = ()
    positions: int = 0
    truncated: bool = False
    announced: Optional[int] = None
    diagnostics: Tuple[str, ...] = ()
    strategy: Optional["SolvedStrategy"] = field(default=None, compare=False, repr=False)

    def describe(self) -> str:
        if self.winner is Winner.DETERMINER:
            return f"determiner wins up to horizon {self.horizon} with {self.k} token(s)"
        if self.winner is Winner.SPOILER:
            return (
                f"spoiler wins with {format_word(self.witness or '')}: "
                f"prefix {format_word(self.losing_prefix or '')} is accepted by no token"
            )
        return "unknown: " + "; ".join(self.diagnostics)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "winner": self.winner.value,
            "k": self.k,
            "horizon": self.horizon,
            "announced": self.announced,
            "witness": self.witness,
            "losing_prefix": self.losing_prefix,
            "positions": self.positions,
            "truncated": self.truncated,
            "diagnostics": list(self.diagnostics),
            "principal_variation": [ply_to_dict(p) for p in self.principal_variation],
        }


def config_to_dict(config: Optional[Configuration]) -> Optional[Dict[str, Any]]:
    if config is None:
        return None
    return {"state": config.state, "stack": list(config.stack)}


def config_from_dict(data: Any) -> Optional[Configuration]:
    if data is None:
        return None
    if not isinstance(data, dict) or not isinstance(data.get("state"), str) or not isinstance(data.get("stack"), list):
        raise GameError(f"malformed configuration {data!r}")
    return Configuration(data["state"], tuple(str(x) for x in data["stack"]))


def ply_to_dict(ply: Ply) -> Dict[str, Any]:
    return {"letter": ply.letter, "tokens": [config_to_dict(c) for c in ply.tokens]}


class _Referee:
    """Move generation and acceptance obligations shared by the solver, the checker and interactive play."""

    def __init__(self, pda: Pda, membership: Optional[Membership], eps_budget: int, strict: bool):
        self.pda = pda
        self.membership = membership or exact_membership(pda)
        self.eps_budget = eps_budget
        self.strict = strict
        self.truncated = False
        self._lock = threading.Lock()
        self._moves: Dict[Tuple[Configuration, str], LetterMoves] = {}
        self._closures: Dict[Configuration, Closure] = {}
        self._members: Dict[str, Tuple[bool, bool]] = {}

    def moves(self, config: Configuration, letter: str) -> LetterMoves:
        key = (config, letter)
        found = self._moves.get(key)
        if found is None:
            found = read_letter(self.pda, config, letter, self.eps_budget, self.strict)
            if found.truncated and not self.truncated:
                logger.warning("epsilon budget %d reached while reading %r from %s", self.eps_budget, letter, config)
                self.truncated = True
            with self._lock:
                found = self._moves.setdefault(key, found)
        return found

    def closure(self, config: Configuration) -> Closure:
        found = self._closures.get(config)
        if found is None:
            found = epsilon_closure(self.pda, config, self.eps_budget)
            with self._lock:
                found = self._closures.setdefault(config, found)
        return found

    def member(self, prefix: str) -> Tuple[bool, bool]:
        found = self._members.get(prefix)
        if found is None:
            verdict = self.membership(prefix)
            found = (True, True) if verdict is None else (bool(verdict), False)
            with self._lock:
                found = self._members.setdefault(prefix, found)
        return found

    def pending(self, prefix: str, live: Iterable[Configuration]) -> Tuple[bool, bool]:
        member, unsure = self.member(prefix)
        return member and not any(self.pda.is_accepting(c) for c in live), unsure

    def stop_certifies(self, config: Configuration) -> bool:
        if self.strict:
            return self.pda.is_accepting(config)
        return self.closure(config).accepting

    def certifies(self, config: Configuration, pick: Pick) -> bool:
        if pick is None:
            return self.stop_certifies(config)
        return pick.via_accepting

    def final_certified(self, live: Sequence[Configuration]) -> Tuple[bool, bool]:
        closures = [self.closure(c) for c in live]
        return any(cl.accepting for cl in closures), any(cl.truncated for cl in closures)

    def options(self, config: Configuration, letter: str) -> Tuple[List[Pick], bool]:
        moves = self.moves(config, letter)
        opts: List[Pick] = list(moves.moves)
        if not opts or (self.stop_certifies(config) and not any(m.via_accepting for m in opts)):
            opts.append(None)
        return opts, moves.truncated


@dataclass(frozen=True)
class _Node:
    win: bool
    witness: str = ""
    losing: Optional[str] = None
    tainted: bool = False
    replies: Mapping[str, Optional[Tuple[Pick, ...]]] = field(default_factory=dict)


class _Reply(NamedTuple):
    win: bool
    picks: Optional[Tuple[Pick, ...]]
    witness: str = ""
    losing: Optional[str] = None
    tainted: bool = False


class GameSolver:
    def __init__(
        self,
        pda: Pda,
        k: int,
        horizon: int,
        eps_budget: int = DEFAULT_EPS_BUDGET,
        membership: Optional[Membership] = None,
        strict: bool = False,
        jobs: int = 1,
    ):
        if k < 1:
            raise GameError("at least one token is required")
        if horizon < 0:
            raise GameError("horizon must be non-negative")
        self.pda = pda
        self.k = k
        self.horizon = horizon
        self.jobs = max(1, jobs)
        self.referee = _Referee(pda, membership, eps_budget, strict)
        self.table: Dict[Tuple[Tokens, str], _Node] = {}
        self._universal: Dict[Tuple[Configuration, int], bool] = {}
        self._lock = threading.Lock()

    @property
    def initial_tokens(self) -> Tokens:
        return (self.pda.initial_configuration(),) * self.k

    def value(self, tokens: Tokens, prefix: str) -> _Node:
        key = (tokens, prefix)
        node = self.table.get(key)
        if node is None:
            node = self._evaluate(tokens, prefix, None)
            with self._lock:
                node = self.table.setdefault(key, node)
        return node

    def universal(self, config: Configuration, depth: int) -> bool:
        if not self.pda.is_accepting(config):
            return False
        if depth == 0:
            return True
        key = (config, depth)
        found = self._universal.get(key)
        if found is None:
            found = all(
                any(self.universal(m.target, depth - 1) for m in self.referee.moves(config, letter))
                for letter in self.pda.letters
            )
            with self._lock:
                found = self._universal.setdefault(key, found)
        return found

    def _evaluate(self, tokens: Tokens, prefix: str, pool: Optional[ThreadPoolExecutor]) -> _Node:
        pending, unsure = self.referee.pending(prefix, tokens)
        if pending and (self.referee.strict or not tokens):
            return _Node(False, prefix, prefix, unsure)
        remaining = self.horizon - len(prefix)
        if remaining <= 0:
            if pending:
                certified, cut = self.referee.final_certified(tokens)
                if not certified:
                    return _Node(False, prefix, prefix, unsure or cut)
            return _Node(True)
        if any(self.universal(c, remaining) for c in tokens):
            return _Node(True)

        replies: Dict[str, Optional[Tuple[Pick, ...]]] = {}
        fallback: Optional[_Node] = None
        for letter, reply in self._replies(tokens, prefix, pending, unsure, pool):
            if reply.win:
                replies[letter] = reply.picks
                continue
            node = _Node(False, reply.witness, reply.losing, reply.tainted, {letter: reply.picks})
            if not reply.tainted:
                return node
            if fallback is None:
                fallback = node
        return fallback or _Node(True, replies=replies)

    def _replies(
        self, tokens: Tokens, prefix: str, pending: bool, unsure: bool, pool: Optional[ThreadPoolExecutor]
    ) -> Iterator[Tuple[str, _Reply]]:
        if pool is None:
            for letter in self.pda.letters:
                yield letter, self.respond(tokens, prefix, pending, unsure, letter)
            return
        futures = [
            (letter, pool.submit(self.respond, tokens, prefix, pending, unsure, letter)) for letter in self.pda.letters
        ]
        for letter, future in futures:
            yield letter, future.result()

    def respond(self, tokens: Tokens, prefix: str, pending: bool, unsure: bool, letter: str) -> _Reply:
        word = prefix + letter
        groups = [(c, len(list(g))) for c, g in itertools.groupby(tokens)]
        choices = []
        cut = False
        for config, count in groups:
            opts, truncated = self.referee.options(config, letter)
            cut = cut or truncated
            choices.append([(config, combo) for combo in itertools.combinations_with_replacement(opts, count)])

        best: Optional[_Reply] = None
        tainted = cut
        seen = set()
        for combo in itertools.product(*choices):
            picks = tuple(p for _, group in combo for p in group)
            if pending and not any(self.referee.certifies(c, p) for c, group in combo for p in group):
                reply = _Reply(False, picks, word, prefix, unsure)
            else:
                child = tuple(sorted(p.target for p in picks if p is not None))
                if child in seen:
                    continue
                seen.add(child)
                node = self.value(child, word)
                if node.win:
                    return _Reply(True, picks)
                reply = _Reply(False, picks, node.witness, node.losing, node.tainted)
            tainted = tainted or reply.tainted
            if best is None or len(reply.witness) > len(best.witness):
                best = reply
        if best is None:
            return _Reply(False, None, word, prefix, tainted or unsure)
        return best._replace(tainted=tainted)

    def _root(self) -> _Node:
        tokens = self.initial_tokens
        if self.jobs == 1:
            return self.value(tokens, "")
        with ThreadPoolExecutor(max_workers=self.jobs) as pool:
            node = self._evaluate(tokens, "", pool)
        with self._lock:
            return self.table.setdefault((tokens, ""), node)

    def principal_variation(self, root: _Node) -> Tuple[Ply, ...]:
        tokens = self.initial_tokens
        prefix = ""
        line = None if root.win else root.witness
        plies: List[Ply] = []
        while len(prefix) < self.horizon:
            node = self.table.get((tokens, prefix))
            if node is None or not node.replies:
                break
            if line is None:
                letter = min(node.replies)
            elif len(prefix) < len(line):
                letter = line[len(prefix)]
            else:
                break
            picks = node.replies.get(letter)
            if picks is None:
                break
            plies.append(Ply(letter, tuple(p.target if p is not None else None for p in picks)))
            tokens = tuple(sorted(p.target for p in picks if p is not None))
            prefix += letter
        return tuple(plies)

    def solve(self, announced: Optional[int] = None) -> GameOutcome:
        root = self._root()
        diagnostics: List[str] = []
        if root.win:
            winner = Winner.DETERMINER
        elif root.tainted:
            winner = Winner.UNKNOWN
            if self.referee.truncated:
                diagnostics.append(f"epsilon budget {self.referee.eps_budget} truncated a deciding branch")
            else:
                diagnostics.append("membership oracle could not decide a deciding prefix")
        else:
            winner = Winner.SPOILER
            member, _ = self.referee.member(root.losing or "")
            if not member:
                raise GameError(f"witness prefix {root.losing!r} is not in the language")
        logger.debug("solved k=%d horizon=%d: %s after %d positions", self.k, self.horizon, winner.value, len(self.table))
        return GameOutcome(
            winner=winner,
            k=self.k,
            horizon=self.horizon,
            witness=None if root.win else root.witness,
            losing_prefix=None if root.win else root.losing,
            principal_variation=self.principal_variation(root),
            positions=len(self.table),
            truncated=self.referee.truncated,
            announced=announced,
            diagnostics=tuple(diagnostics),
            strategy=SolvedStrategy(self),
        )


def solve(
    pda: Pda,
    k: int,
    horizon: int,
    eps_budget: int = DEFAULT_EPS_BUDGET,
    membership: Optional[Membership] = None,
    strict: bool = False,
    jobs: int = 1,
) -> GameOutcome:
    return GameSolver(pda, k, horizon, eps_budget, membership, strict, jobs).solve()


def solve_parameterized(
    pda: Pda,
    token_fn: Callable[[int], int],
    n: int,
    eps_budget: int = DEFAULT_EPS_BUDGET,
    membership: Optional[Membership] = None,
    strict: bool = False,
    jobs: int = 1,
) -> GameOutcome:
    k = token_fn(n)
    if k < 1:
        raise GameError(f"token function gives {k} tokens for n={n}")
    return GameSolver(pda, k, n, eps_budget, membership, strict, jobs).solve(announced=n)


def token_function(name: str, pda: Optional[Pda] = None) -> Callable[[int], int]:
    if name == "linear":
        return lambda n: n
    if name == "exp":
        m = max(1, max_out_degree(pda)) if pda is not None else 2
        return lambda n: m**n
    value = name.split(":", 1)[1] if name.startswith("const:") else name
    if not value.isdigit() or int(value) < 1:
        raise GameError(f"unknown token function {name!r}; expected linear, exp or const:K")
    return lambda n: int(value)


class DeterminerStrategy:
    name = "strategy"

    def respond(self, prefix: str, letter: str, tokens: Seats, options: Sequence[LetterMoves]) -> Tuple[Pick, ...]:
        raise NotImplementedError


class SolvedStrategy(DeterminerStrategy):
    name = "solved"

    def __init__(self, solver: GameSolver):
        self.solver = solver

    def respond(self, prefix: str, letter: str, tokens: Seats, options: Sequence[LetterMoves]) -> Tuple[Pick, ...]:
        seated = sorted((c, i) for i, c in enumerate(tokens) if c is not None)
        live = tuple(c for c, _ in seated)
        node = self.solver.value(live, prefix)
        picks = node.replies.get(letter)
        if picks is None:
            pending, unsure = self.solver.referee.pending(prefix, live)
            picks = self.solver.respond(live, prefix, pending, unsure, letter).picks
        out: List[Pick] = [None] * len(tokens)
        for (_, i), pick in zip(seated, picks or ()):
            out[i] = pick
        return tuple(out)


def _is_guess(move: LetterMove) -> bool:
    return move.letter_step.source == IDLE and move.target.state != IDLE


class RoundRobinStrategy(DeterminerStrategy):
    """Token i restarts its counter at every input position congruent to i modulo n."""

    name = "round_robin"

    def __init__(self, n: int):
        if n < 1:
            raise GameError("round robin needs at least one token")
        self.n = n
        self._mode: Optional[str] = None

    def _detect(self, tokens: Seats) -> str:
        states = {c.state for c in tokens if c is not None}
        if IDLE in states:
            return "suffix"
        if states & {"start", BOUNDARY}:
            return "mod"
        raise IllegalMove(f"round robin needs a counter automaton starting in {IDLE} or start/{BOUNDARY}")

    def respond(self, prefix: str, letter: str, tokens: Seats, options: Sequence[LetterMoves]) -> Tuple[Pick, ...]:
        if not prefix or self._mode is None:
            self._mode = self._detect(tokens)
        j = len(prefix) + 1
        return tuple(
            None if c is None else self._pick(i % self.n, j, opts) for i, (c, opts) in enumerate(zip(tokens, options))
        )

    def _pick(self, i: int, j: int, options: LetterMoves) -> Pick:
        moves = list(options)
        if self._mode == "suffix":
            guessing = j % self.n == i
            chosen = [m for m in moves if _is_guess(m) == guessing]
        elif j <= i:
            chosen = [m for m in moves if m.letter_step.source != BOUNDARY]
        elif j == i + 1:
            chosen = [m for m in moves if m.letter_step.source == BOUNDARY]
        else:
            chosen = moves
        return chosen[0] if chosen else None


class BranchPerTokenStrategy(DeterminerStrategy):
    name = "branch_per_token"

    def respond(self, prefix: str, letter: str, tokens: Seats, options: Sequence[LetterMoves]) -> Tuple[Pick, ...]:
        out: List[Pick] = []
        for i, (c, opts) in enumerate(zip(tokens, options)):
            out.append(opts.moves[i % len(opts)] if c is not None and len(opts) else None)
        return tuple(out)


def scripted_round_robin(n: int) -> RoundRobinStrategy:
    return RoundRobinStrategy(n)


def branch_per_token() -> BranchPerTokenStrategy:
    return BranchPerTokenStrategy()


@dataclass
class Transcript:
    k: int
    human_role: str
    word: str = ""
    plies: List[Ply] = field(default_factory=list)
    result: str = "open"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "k": self.k,
            "human_role": self.human_role,
            "word": self.word,
            "plies": [ply_to_dict(p) for p in self.plies],
            "result": self.result,
        }

    @classmethod
    def from_dict(cls, data: Any) -> "Transcript":
        if not isinstance(data, dict):
            raise GameError("transcript must be an object")
        try:
            plies = [Ply(str(p["letter"]), tuple(config_from_dict(c) for c in p["tokens"])) for p in data["plies"]]
            transcript = cls(int(data["k"]), str(data.get("human_role", "spoiler")), "".join(p.letter for p in plies), plies)
        except (KeyError, TypeError, ValueError) as exc:
            raise GameError(f"malformed transcript: {exc}") from exc
        transcript.result = str(data.get("result", "open"))
        if any(len(p.tokens) != transcript.k for p in plies):
            raise GameError("every ply must list one entry per token")
        return transcript


class ReplayStrategy(DeterminerStrategy):
    name = "replay"

    def __init__(self, transcript: Transcript):
        self.transcript = transcript

    def respond(self, prefix: str, letter: str, tokens: Seats, options: Sequence[LetterMoves]) -> Tuple[Pick, ...]:
        index = len(prefix)
        word = self.transcript.word
        if index >= len(word) or word[:index] != prefix or word[index] != letter:
            raise IllegalMove(f"transcript has no reply to {letter!r} after {format_word(prefix)}")
        out: List[Pick] = []
        for i, (target, opts) in enumerate(zip(self.transcript.plies[index].tokens, options)):
            if target is None:
                out.append(None)
                continue
            match = next((m for m in opts if m.target == target), None)
            if match is None:
                raise IllegalMove(f"token {i}: {target} is not reachable by reading {letter!r}")
            out.append(match)
        return tuple(out)


@dataclass(frozen=True)
class StrategyCheck:
    ok: bool
    failing_play: Optional[str] = None
    losing_prefix: Optional[str] = None
    plays: int = 0


def _check_picks(tokens: Seats, options: Sequence[LetterMoves], picks: Sequence[Pick], letter: str) -> None:
    if len(picks) != len(tokens):
        raise IllegalMove(f"strategy answered for {len(picks)} tokens, expected {len(tokens)}")
    for i, (c, opts, pick) in enumerate(zip(tokens, options, picks)):
        if pick is None:
            continue
        if c is None:
            raise IllegalMove(f"token {i} was stopped and cannot move")
        if pick not in opts.moves:
            raise IllegalMove(f"token {i}: {pick.target} is not a legal move on {letter!r} from {c}")


def check_strategy(
    pda: Pda,
    k: int,
    strategy: DeterminerStrategy,
    horizon: int,
    eps_budget: int = DEFAULT_EPS_BUDGET,
    membership: Optional[Membership] = None,
    strict: bool = False,
    words: Optional[Iterable[str]] = None,
) -> StrategyCheck:
    referee = _Referee(pda, membership, eps_budget, strict)
    plays = list(words) if words is not None else None
    leaves = 0

    def next_letters(prefix: str) -> List[str]:
        if plays is None:
            return list(pda.letters)
        return sorted({w[len(prefix)] for w in plays if len(w) > len(prefix) and w.startswith(prefix)})

    def visit(tokens: Seats, prefix: str) -> Optional[Tuple[str, str]]:
        nonlocal leaves
        live = tuple(c for c in tokens if c is not None)
        pending, _ = referee.pending(prefix, live)
        if pending and (strict or not live):
            return prefix, prefix
        letters = next_letters(prefix) if len(prefix) < horizon else []
        if not letters:
            leaves += 1
            if pending and not referee.final_certified(live)[0]:
                return prefix, prefix
            return None
        for letter in letters:
            options = tuple(referee.moves(c, letter) if c is not None else LetterMoves(()) for c in tokens)
            picks = strategy.respond(prefix, letter, tokens, options)
            _check_picks(tokens, options, picks, letter)
            if pending and not any(referee.certifies(c, p) for c, p in zip(tokens, picks) if c is not None):
                return prefix + letter, prefix
            failure = visit(tuple(p.target if p is not None else None for p in picks), prefix + letter)
            if failure is not None:
                return failure
        return None

    failure = visit((pda.initial_configuration(),) * k, "")
    if failure is None:
        return StrategyCheck(True, plays=leaves)
    return StrategyCheck(False, failure[0], failure[1], leaves)


def replay_transcript(
    pda: Pda,
    transcript: Transcript,
    eps_budget: int = DEFAULT_EPS_BUDGET,
    membership: Optional[Membership] = None,
    strict: bool = False,
) -> StrategyCheck:
    return check_strategy(
        pda,
        transcript.k,
        ReplayStrategy(transcript),
        len(transcript.word),
        eps_budget,
        membership,
        strict,
        words=[transcript.word],
    )


def strategy_to_dict(solver: GameSolver) -> Dict[str, Any]:
    entries = []
    for (tokens, prefix), node in sorted(solver.table.items(), key=lambda item: (item[0][1], item[0][0])):
        if not node.win:
            continue
        for letter, picks in sorted(node.replies.items()):
            entries.append(
                {
                    "prefix": prefix,
                    "tokens": [config_to_dict(c) for c in tokens],
                    "letter": letter,
                    "reply": [config_to_dict(p.target) if p is not None else None for p in picks or ()],
                }
            )
    return {"k": solver.k, "horizon": solver.horizon, "entries": entries}


def _describe_tokens(tokens: Seats) -> str:
    return ", ".join(f"#{i} {c if c is not None else 'stopped'}" for i, c in enumerate(tokens))


def _ask_letter(pda: Pda, read: Callable[[str], str], write: Callable[[str], None]) -> Optional[str]:
    while True:
        try:
            line = read("letter> ").strip()
        except EOFError:
            return None
        if line == QUIT:
            return None
        if line in pda.input_alphabet:
            return line
        write(f"letter must be one of {' '.join(pda.letters)} (or {QUIT})")


def _ask_picks(
    tokens: Seats,
    options: Sequence[LetterMoves],
    read: Callable[[str], str],
    write: Callable[[str], None],
) -> Optional[Tuple[Pick, ...]]:
    menus: List[List[Pick]] = []
    for i, (c, opts) in enumerate(zip(tokens, options)):
        menu: List[Pick] = list(opts.moves) + [None] if c is not None else [None]
        menus.append(menu)
        if c is not None:
            listing = " ".join(f"[{n}] {m.target if m is not None else 'stop'}" for n, m in enumerate(menu))
            write(f"token {i} at {c}: {listing}")
    while True:
        try:
            line = read("moves> ").strip()
        except EOFError:
            return None
        if line == QUIT:
            return None
        parts = line.split()
        live = [i for i, c in enumerate(tokens) if c is not None]
        if len(parts) == len(live) and all(p.isdigit() for p in parts):
            chosen = [int(p) for p in parts]
            if all(n < len(menus[i]) for i, n in zip(live, chosen)):
                picks: List[Pick] = [None] * len(tokens)
                for i, n in zip(live, chosen):
                    picks[i] = menus[i][n]
                return tuple(picks)
        write(f"enter {len(live)} option number(s), one per live token (or {QUIT})")


def play_interactive(
    pda: Pda,
    k: int,
    human_role: str,
    eps_budget: int = DEFAULT_EPS_BUDGET,
    horizon: int = DEFAULT_INTERACTIVE_HORIZON,
    membership: Optional[Membership] = None,
    strict: bool = False,
    read: Callable[[str], str] = input,
    write: Callable[[str], None] = print,
) -> Transcript:
    if human_role not in HUMAN_ROLES:
        raise GameError(f"human role must be one of {', '.join(HUMAN_ROLES)}")
    solver = GameSolver(pda, k, horizon, eps_budget, membership, strict)
    referee = solver.referee
    machine = SolvedStrategy(solver)
    transcript = Transcript(k, human_role)
    tokens: Seats = (pda.initial_configuration(),) * k
    prefix = ""
    write(f"{k} token(s) over {' '.join(pda.letters)}, horizon {horizon}; type {QUIT} to stop")

    while True:
        live = tuple(c for c in tokens if c is not None)
        pending, _ = referee.pending(prefix, live)
        if pending and (strict or not live):
            transcript.result = Winner.SPOILER.value
            write(f"determiner loses: {format_word(prefix)} is in the language but no token accepts it")
            break
        if len(prefix) >= horizon:
            if pending and not referee.final_certified(live)[0]:
                transcript.result = Winner.SPOILER.value
                write(f"determiner loses: {format_word(prefix)} is in the language but no token accepts it")
            else:
                transcript.result = Winner.DETERMINER.value
                write(f"determiner survives to horizon {horizon}")
            break

        if human_role == "spoiler":
            letter = _ask_letter(pda, read, write)
            if letter is None:
                transcript.result = QUIT
                break
        else:
            node = solver.value(tuple(sorted(live)), prefix)
            if not node.win and len(node.witness) > len(prefix):
                letter = node.witness[len(prefix)]
            else:
                letter = pda.letters[0]
            write(f"spoiler plays {letter}")

        options = tuple(referee.moves(c, letter) if c is not None else LetterMoves(()) for c in tokens)
        if human_role == "spoiler":
            picks = machine.respond(prefix, letter, tokens, options)
        else:
            chosen = _ask_picks(tokens, options, read, write)
            if chosen is None:
                transcript.result = QUIT
                break
            picks = chosen

        certified = any(referee.certifies(c, p) for c, p in zip(tokens, picks) if c is not None)
        tokens = tuple(p.target if p is not None else None for p in picks)
        transcript.plies.append(Ply(letter, tokens))
        transcript.word = prefix + letter
        if pending and not certified:
            transcript.result = Winner.SPOILER.value
            write(f"determiner loses: {format_word(prefix)} is in the language but no token accepts it")
            break
        prefix += letter
        write(_describe_tokens(tokens))
    return transcript
