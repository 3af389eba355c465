from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, Iterator, List, Mapping, Optional, Tuple

from .automata import AlphabetMismatch
from .turing import TuringMachine, encoding_alphabet, invalc_oracle, tm_from_dict, tm_to_dict

Pair = Tuple[int, int]

_AB = frozenset("ab")
_BLOCK = frozenset("a#b")
_ABC = frozenset("abc")
_BLOCK_C = frozenset("a#bc")
_BINARY = frozenset("01")

_BLOCK_SHAPE = re.compile(r"((?:a*#)+)(b*)")
_LS_SHAPE = re.compile(r"(a*)(b*)(c*)")
_TAIL_SHAPE = re.compile(r"(b*)(c*)")


class LanguageError(Exception):
    pass


@dataclass(frozen=True)
class LanguageSpec:
    tag = "language"

    @property
    def alphabet(self) -> FrozenSet[str]:
        raise NotImplementedError

    def contains(self, w: str) -> bool:
        raise NotImplementedError

    def params(self) -> Dict[str, Any]:
        return {}

    def to_dict(self) -> Dict[str, Any]:
        return {"language": self.tag, **self.params()}


def _in_multiple(i: int, w: str) -> bool:
    n = len(w) - len(w.lstrip("a"))
    return w == "a" * n + "b" * (i * n)


@dataclass(frozen=True)
class Li(LanguageSpec):
    i: int
    tag = "multiple"

    @property
    def alphabet(self) -> FrozenSet[str]:
        return _AB

    def contains(self, w: str) -> bool:
        return _in_multiple(self.i, w)

    def params(self) -> Dict[str, Any]:
        return {"i": self.i}


@dataclass(frozen=True)
class Union(LanguageSpec):
    k: int
    tag = "union"

    @property
    def alphabet(self) -> FrozenSet[str]:
        return _AB

    def contains(self, w: str) -> bool:
        return any(_in_multiple(i, w) for i in range(1, self.k + 2))

    def params(self) -> Dict[str, Any]:
        return {"k": self.k}


def _in_block(w: str) -> bool:
    m = _BLOCK_SHAPE.fullmatch(w)
    if not m:
        return False
    blocks = m.group(1).split("#")[:-1]
    return len(m.group(2)) in {len(block) for block in blocks}


@dataclass(frozen=True)
class Block(LanguageSpec):
    tag = "block"

    @property
    def alphabet(self) -> FrozenSet[str]:
        return _BLOCK

    def contains(self, w: str) -> bool:
        return _in_block(w)


@dataclass(frozen=True)
class BlockK(LanguageSpec):
    k: int
    tag = "block_k"

    @property
    def alphabet(self) -> FrozenSet[str]:
        return _BLOCK

    def region(self) -> "re.Pattern[str]":
        return re.compile(r"(?:a*#){%d}b*" % (self.k + 1))

    def contains(self, w: str) -> bool:
        return bool(self.region().fullmatch(w)) and _in_block(w)

    def params(self) -> Dict[str, Any]:
        return {"k": self.k}


@dataclass(frozen=True)
class Ln(LanguageSpec):
    n: int
    tag = "suffix_one"

    @property
    def alphabet(self) -> FrozenSet[str]:
        return _BINARY

    def contains(self, w: str) -> bool:
        return len(w) >= self.n and w[-self.n] == "1"

    def params(self) -> Dict[str, Any]:
        return {"n": self.n}


@dataclass(frozen=True)
class ModN(LanguageSpec):
    n: int
    tag = "mod_n"

    @property
    def alphabet(self) -> FrozenSet[str]:
        return _BINARY

    def contains(self, w: str) -> bool:
        start = len(w) % self.n
        return all(w[p] == "1" for p in range(start, len(w), self.n))

    def params(self) -> Dict[str, Any]:
        return {"n": self.n}


def _pairs(table: Mapping[Any, Any]) -> Dict[Any, FrozenSet[Pair]]:
    return {key: frozenset((int(i), int(j)) for i, j in pairs) for key, pairs in table.items()}


def _dump_pairs(table: Mapping[Any, FrozenSet[Pair]]) -> Dict[str, List[List[int]]]:
    return {str(key): [list(p) for p in sorted(pairs)] for key, pairs in sorted(table.items())}


@dataclass(frozen=True, eq=False)
class LS(LanguageSpec):
    table: Mapping[int, FrozenSet[Pair]] = field(default_factory=dict)
    tag = "ls"

    @property
    def alphabet(self) -> FrozenSet[str]:
        return _ABC

    def contains(self, w: str) -> bool:
        m = _LS_SHAPE.fullmatch(w)
        if not m:
            return False
        n, bs, cs = (len(g) for g in m.groups())
        return any(bs == i * n and cs == j * n for i, j in self.table.get(n, ()))

    def params(self) -> Dict[str, Any]:
        return {"table": _dump_pairs(self.table)}


@dataclass(frozen=True, eq=False)
class BlockS(LanguageSpec):
    """Words s b^i c^|j-i| for (i, j) listed under the prefix s."""

    table: Mapping[str, FrozenSet[Pair]] = field(default_factory=dict)
    tag = "block_s"

    @property
    def alphabet(self) -> FrozenSet[str]:
        return _BLOCK_C

    def contains(self, w: str) -> bool:
        for s, pairs in self.table.items():
            if not w.startswith(s):
                continue
            m = _TAIL_SHAPE.fullmatch(w[len(s) :])
            if not m:
                continue
            bs, cs = len(m.group(1)), len(m.group(2))
            if any(bs == i and cs == abs(j - i) for i, j in pairs):
                return True
        return False

    def params(self) -> Dict[str, Any]:
        return {"table": _dump_pairs(self.table)}


@dataclass(frozen=True, eq=False)
class Invalc(LanguageSpec):
    tm: TuringMachine
    tag = "invalc"

    @property
    def alphabet(self) -> FrozenSet[str]:
        return encoding_alphabet(self.tm)

    def contains(self, w: str) -> bool:
        return invalc_oracle(self.tm, w)

    def params(self) -> Dict[str, Any]:
        return {"machine": tm_to_dict(self.tm)}


def decide(spec: LanguageSpec, w: str) -> bool:
    stray = sorted(set(w) - spec.alphabet)
    if stray:
        raise AlphabetMismatch(f"letters {stray} are not in the alphabet of {spec.tag}")
    return spec.contains(w)


def words(alphabet, max_len: int) -> Iterator[str]:
    letters = sorted(alphabet)
    for length in range(max_len + 1):
        for letter_tuple in itertools.product(letters, repeat=length):
            yield "".join(letter_tuple)


def enumerate_language(spec: LanguageSpec, max_len: int) -> List[str]:
    return [w for w in words(spec.alphabet, max_len) if spec.contains(w)]


def _natural(data: Dict[str, Any], key: str) -> int:
    value = data.get(key)
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise LanguageError(f"field {key} must be a positive integer")
    return value


def spec_from_dict(data: Dict[str, Any]) -> LanguageSpec:
    if not isinstance(data, dict):
        raise LanguageError("language document must be an object")
    tag = data.get("language")
    if tag == "multiple":
        return Li(_natural(data, "i"))
    if tag == "union":
        return Union(_natural(data, "k"))
    if tag == "block":
        return Block()
    if tag == "block_k":
        return BlockK(_natural(data, "k"))
    if tag == "suffix_one":
        return Ln(_natural(data, "n"))
    if tag == "mod_n":
        return ModN(_natural(data, "n"))
    if tag in ("ls", "block_s"):
        table = data.get("table")
        if not isinstance(table, dict):
            raise LanguageError("field table must be an object")
        try:
            pairs = _pairs(table)
        except (TypeError, ValueError) as exc:
            raise LanguageError(f"malformed pair table: {exc}") from exc
        if any(i < 1 or j < 1 for ps in pairs.values() for i, j in ps):
            raise LanguageError("pair tables hold positive pairs only")
        if tag == "ls":
            try:
                return LS({int(n): ps for n, ps in pairs.items()})
            except ValueError as exc:
                raise LanguageError(f"ls table keys must be naturals: {exc}") from exc
        return BlockS(pairs)
    if tag == "invalc":
        return Invalc(tm_from_dict(data.get("machine")))
    raise LanguageError(f"unknown language {tag!r}")


def spec_for_family(family: str, param: Optional[int] = None, tm: Optional[TuringMachine] = None) -> LanguageSpec:
    if family == "multiple":
        return Li(param)
    if family == "union":
        return Union(param)
    if family == "block":
        return Block()
    if family == "block_k":
        return BlockK(param)
    if family == "suffix_one":
        return Ln(param)
    if family == "mod_n":
        return ModN(param)
    if family == "invalc" and tm is not None:
        return Invalc(tm)
    raise LanguageError(f"no witness language for family {family!r}")
