from __future__ import annotations

import itertools
import logging
import threading
from collections import OrderedDict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Set, Tuple, Union

import networkx as nx

from .automata import AlphabetMismatch, Pda, Transition, state_graph

logger = logging.getLogger(__name__)

DEFAULT_MAX_NONTERMINALS = 20000

Nonterminal = Tuple[str, ...]
Symbol = Union[str, Nonterminal]
Body = Tuple[Symbol, ...]

RAW_START: Nonterminal = ("S",)
START: Nonterminal = ("S0",)


class GrammarError(Exception):
    pass


class GrammarTooLarge(GrammarError):
    pass


def is_terminal(symbol: Symbol) -> bool:
    return isinstance(symbol, str)


@dataclass(frozen=True, eq=False)
class Grammar:
    start: Nonterminal
    terminals: FrozenSet[str]
    productions: Dict[Nonterminal, FrozenSet[Body]] = field(default_factory=dict)
    accepts_empty: bool = False
    normalized: bool = False

    @property
    def nonterminals(self) -> FrozenSet[Nonterminal]:
        return frozenset(self.productions)

    def rule_count(self) -> int:
        return sum(len(bodies) for bodies in self.productions.values())

    @cached_property
    def _by_terminal(self) -> Dict[str, FrozenSet[Nonterminal]]:
        index: Dict[str, Set[Nonterminal]] = {}
        for head, bodies in self.productions.items():
            for body in bodies:
                if len(body) == 1 and is_terminal(body[0]):
                    index.setdefault(body[0], set()).add(head)
        return {k: frozenset(v) for k, v in index.items()}

    @cached_property
    def _by_pair(self) -> Dict[Tuple[Nonterminal, Nonterminal], FrozenSet[Nonterminal]]:
        index: Dict[Tuple[Nonterminal, Nonterminal], Set[Nonterminal]] = {}
        for head, bodies in self.productions.items():
            for body in bodies:
                if len(body) == 2:
                    index.setdefault((body[0], body[1]), set()).add(head)
        return {k: frozenset(v) for k, v in index.items()}


def _fresh(base: str, taken: Iterable[str]) -> str:
    used = set(taken)
    name = base
    while name in used:
        name += "'"
    return name


def to_empty_stack(pda: Pda) -> Pda:
    start = _fresh("start", pda.states)
    drain = _fresh("drain", pda.states | {start})
    bottom = _fresh("bottom", pda.stack_alphabet)
    symbols = pda.stack_alphabet | {bottom}

    ts: List[Transition] = list(pda.transitions)
    ts.append(Transition(start, None, bottom, pda.initial_state, (pda.initial_stack, bottom)))
    for f in sorted(pda.accepting):
        for x in sorted(symbols):
            ts.append(Transition(f, None, x, drain, ()))
    for x in sorted(symbols):
        ts.append(Transition(drain, None, x, drain, ()))

    return Pda(
        states=pda.states | {start, drain},
        input_alphabet=pda.input_alphabet,
        stack_alphabet=symbols,
        transitions=tuple(sorted(set(ts), key=Transition.sort_key)),
        initial_state=start,
        initial_stack=bottom,
        accepting=frozenset(),
    )


def _triple(p: str, x: str, q: str) -> Nonterminal:
    return ("T", p, x, q)


def _productive_triples(pda: Pda, transitions: List[Transition], cap: int) -> Set[Tuple[str, str, str]]:
    productive: Set[Tuple[str, str, str]] = set()
    ends: Dict[Tuple[str, str], Set[str]] = {}

    def add(triple: Tuple[str, str, str]) -> bool:
        if triple in productive:
            return False
        productive.add(triple)
        ends.setdefault((triple[0], triple[1]), set()).add(triple[2])
        if len(productive) > cap:
            raise GrammarTooLarge(
                f"grammar needs more than {cap} nonterminals; raise max_nonterminals to continue"
            )
        return True

    changed = True
    rounds = 0
    while changed:
        changed = False
        rounds += 1
        for t in transitions:
            if not t.push:
                changed = add((t.source, t.pop, t.target)) or changed
            elif len(t.push) == 1:
                for q in sorted(ends.get((t.target, t.push[0]), ())):
                    changed = add((t.source, t.pop, q)) or changed
            else:
                for s in sorted(ends.get((t.target, t.push[0]), ())):
                    for q in sorted(ends.get((s, t.push[1]), ())):
                        changed = add((t.source, t.pop, q)) or changed
    logger.debug("productive triples: %d after %d rounds", len(productive), rounds)
    return productive


def triple_grammar(pda: Pda, max_nonterminals: int = DEFAULT_MAX_NONTERMINALS) -> Grammar:
    graph = state_graph(pda)
    reachable = nx.descendants(graph, pda.initial_state) | {pda.initial_state}
    transitions = [t for t in pda.transitions if t.source in reachable]
    productive = _productive_triples(pda, transitions, max_nonterminals)
    ends: Dict[Tuple[str, str], List[str]] = {}
    for p, x, q in sorted(productive):
        ends.setdefault((p, x), []).append(q)

    productions: Dict[Nonterminal, Set[Body]] = {RAW_START: set()}
    for q in ends.get((pda.initial_state, pda.initial_stack), []):
        productions[RAW_START].add((_triple(pda.initial_state, pda.initial_stack, q),))

    for t in transitions:
        lead: Body = (t.letter,) if t.letter is not None else ()
        if not t.push:
            if (t.source, t.pop, t.target) in productive:
                productions.setdefault(_triple(t.source, t.pop, t.target), set()).add(lead)
        elif len(t.push) == 1:
            for q in ends.get((t.target, t.push[0]), []):
                head = _triple(t.source, t.pop, q)
                productions.setdefault(head, set()).add(lead + (_triple(t.target, t.push[0], q),))
        else:
            for s in ends.get((t.target, t.push[0]), []):
                for q in ends.get((s, t.push[1]), []):
                    head = _triple(t.source, t.pop, q)
                    body = lead + (_triple(t.target, t.push[0], s), _triple(s, t.push[1], q))
                    productions.setdefault(head, set()).add(body)

    return Grammar(
        start=RAW_START,
        terminals=pda.input_alphabet,
        productions={h: frozenset(b) for h, b in productions.items()},
    )


def _nullable(productions: Dict[Nonterminal, Set[Body]]) -> Set[Nonterminal]:
    nullable: Set[Nonterminal] = set()
    changed = True
    while changed:
        changed = False
        for head, bodies in productions.items():
            if head in nullable:
                continue
            if any(all(s in nullable for s in body) for body in bodies):
                nullable.add(head)
                changed = True
    return nullable


def _remove_epsilon(productions: Dict[Nonterminal, Set[Body]], nullable: Set[Nonterminal]) -> Dict[Nonterminal, Set[Body]]:
    out: Dict[Nonterminal, Set[Body]] = {}
    for head, bodies in productions.items():
        expanded: Set[Body] = set()
        for body in bodies:
            choices = [((s,), ()) if s in nullable else ((s,),) for s in body]
            for pick in itertools.product(*choices):
                candidate = tuple(itertools.chain.from_iterable(pick))
                if candidate:
                    expanded.add(candidate)
        out[head] = expanded
    return out


def _remove_units(productions: Dict[Nonterminal, Set[Body]]) -> Dict[Nonterminal, Set[Body]]:
    units = nx.DiGraph()
    units.add_nodes_from(productions)
    for head, bodies in productions.items():
        for body in bodies:
            if len(body) == 1 and not is_terminal(body[0]):
                units.add_edge(head, body[0])
    out: Dict[Nonterminal, Set[Body]] = {}
    for head in productions:
        closure = {head} | nx.descendants(units, head)
        merged: Set[Body] = set()
        for other in closure:
            for body in productions.get(other, ()):
                if not (len(body) == 1 and not is_terminal(body[0])):
                    merged.add(body)
        out[head] = merged
    return out


def _remove_useless(productions: Dict[Nonterminal, Set[Body]], start: Nonterminal) -> Dict[Nonterminal, Set[Body]]:
    generating: Set[Nonterminal] = set()
    changed = True
    while changed:
        changed = False
        for head, bodies in productions.items():
            if head in generating:
                continue
            if any(all(is_terminal(s) or s in generating for s in body) for body in bodies):
                generating.add(head)
                changed = True

    kept = {
        head: {b for b in bodies if all(is_terminal(s) or s in generating for s in b)}
        for head, bodies in productions.items()
        if head in generating
    }
    if start not in kept:
        return {}
    uses = nx.DiGraph()
    uses.add_nodes_from(kept)
    for head, bodies in kept.items():
        for body in bodies:
            for s in body:
                if not is_terminal(s):
                    uses.add_edge(head, s)
    reachable = {start} | nx.descendants(uses, start)
    return {h: b for h, b in kept.items() if h in reachable}


def _to_cnf(productions: Dict[Nonterminal, Set[Body]]) -> Dict[Nonterminal, Set[Body]]:
    out: Dict[Nonterminal, Set[Body]] = {}

    def lift(symbol: Symbol) -> Symbol:
        if not is_terminal(symbol):
            return symbol
        head = ("t", symbol)
        out.setdefault(head, set()).add((symbol,))
        return head

    for head, bodies in productions.items():
        for body in bodies:
            if len(body) == 1:
                out.setdefault(head, set()).add(body)
                continue
            symbols = [lift(s) for s in body]
            current = head
            while len(symbols) > 2:
                rest = tuple(symbols[1:])
                nxt = ("bin",) + rest
                out.setdefault(current, set()).add((symbols[0], nxt))
                current = nxt
                symbols = symbols[1:]
            out.setdefault(current, set()).add((symbols[0], symbols[1]))
    return out


def normalize(grammar: Grammar) -> Grammar:
    productions: Dict[Nonterminal, Set[Body]] = {h: set(b) for h, b in grammar.productions.items()}
    productions[START] = {(grammar.start,)}
    nullable = _nullable(productions)
    productions = _remove_epsilon(productions, nullable)
    productions = _remove_units(productions)
    productions = _remove_useless(productions, START)
    productions = _to_cnf(productions)
    result = Grammar(
        start=START,
        terminals=grammar.terminals,
        productions={h: frozenset(b) for h, b in productions.items()},
        accepts_empty=START in nullable,
        normalized=True,
    )
    logger.debug("normalized grammar: %d nonterminals, %d rules", len(result.productions), result.rule_count())
    return result


def to_cfg(pda: Pda, max_nonterminals: int = DEFAULT_MAX_NONTERMINALS) -> Grammar:
    return normalize(triple_grammar(pda, max_nonterminals))


def cyk(grammar: Grammar, word: str) -> bool:
    if not word:
        return grammar.accepts_empty
    if not grammar.productions:
        return False
    n = len(word)
    by_terminal = grammar._by_terminal
    by_pair = grammar._by_pair
    table: List[List[FrozenSet[Nonterminal]]] = [[frozenset()] * (n + 1) for _ in range(n)]
    for i, letter in enumerate(word):
        table[i][1] = by_terminal.get(letter, frozenset())
    for length in range(2, n + 1):
        for i in range(0, n - length + 1):
            cell: Set[Nonterminal] = set()
            for split in range(1, length):
                left = table[i][split]
                right = table[i + split][length - split]
                if not left or not right:
                    continue
                for b in left:
                    for c in right:
                        heads = by_pair.get((b, c))
                        if heads:
                            cell.update(heads)
            table[i][length] = frozenset(cell)
    return grammar.start in table[0][n]


GRAMMAR_CACHE_SIZE = 32

# least recently used first
_GRAMMARS: "OrderedDict[Pda, Grammar]" = OrderedDict()
_GRAMMARS_LOCK = threading.Lock()


def grammar_for(pda: Pda, max_nonterminals: Optional[int] = None) -> Grammar:
    with _GRAMMARS_LOCK:
        cached = _GRAMMARS.get(pda)
        if cached is not None:
            _GRAMMARS.move_to_end(pda)
            return cached
    grammar = to_cfg(to_empty_stack(pda), max_nonterminals or DEFAULT_MAX_NONTERMINALS)
    with _GRAMMARS_LOCK:
        grammar = _GRAMMARS.setdefault(pda, grammar)
        _GRAMMARS.move_to_end(pda)
        while len(_GRAMMARS) > GRAMMAR_CACHE_SIZE:
            evicted, _ = _GRAMMARS.popitem(last=False)
            logger.debug("grammar cache full, dropped a PDA with %d states", len(evicted.states))
        return grammar


def clear_grammar_cache() -> None:
    with _GRAMMARS_LOCK:
        _GRAMMARS.clear()


def exact_accepts(pda: Pda, word: str, max_nonterminals: Optional[int] = None) -> bool:
    stray = sorted(set(word) - pda.input_alphabet)
    if stray:
        raise AlphabetMismatch(f"letters {stray} are not in the input alphabet")
    return cyk(grammar_for(pda, max_nonterminals), word)


def exact_membership(pda: Pda, max_nonterminals: Optional[int] = None) -> Callable[[str], bool]:
    grammar = grammar_for(pda, max_nonterminals)

    def member(word: str) -> bool:
        return cyk(grammar, word)

    return member


def render_symbol(symbol: Symbol) -> str:
    if is_terminal(symbol):
        return symbol
    tag = symbol[0]
    if tag == "T":
        return f"[{symbol[1]} {symbol[2]} {symbol[3]}]"
    if tag == "t":
        return f"T_{symbol[1]}"
    if tag == "bin":
        return "<" + " ".join(render_symbol(s) for s in symbol[1:]) + ">"
    return "".join(symbol)


def dump_grammar(grammar: Grammar) -> str:
    lines = []
    if grammar.accepts_empty:
        lines.append(f"{render_symbol(grammar.start)} -> ε")
    for head in sorted(grammar.productions, key=render_symbol):
        for body in sorted(grammar.productions[head], key=lambda b: [render_symbol(s) for s in b]):
            rendered = " ".join(render_symbol(s) for s in body) or "ε"
            lines.append(f"{render_symbol(head)} -> {rendered}")
    return "\n".join(lines) + ("\n" if lines else "")
