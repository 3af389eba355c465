from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from typing import Any, Dict, IO, List, Optional, Tuple, Union

from .automata import size
from .constructions import build_family, needs_param
from .game import GameSolver
from .grammar import exact_membership
from .runs import DEFAULT_EPS_BUDGET
from .settings import ConfigError, coerce_natural, parse_flag
from .utils import DocumentError, read_json_document

logger = logging.getLogger(__name__)

EXPERIMENT_FAMILIES = ("multiple", "union", "block", "block_k", "suffix_one", "mod_n")
TOKEN_NAMES = ("param", "param+1", "linear")

COLUMNS = [
    "family",
    "param",
    "states",
    "stack_symbols",
    "size",
    "transitions",
    "tokens",
    "horizon",
    "verdict",
    "witness",
    "positions",
]

TokenSpec = Union[int, str]


@dataclass(frozen=True)
class ExperimentConfig:
    family: str
    params: Tuple[Optional[int], ...]
    tokens: Tuple[TokenSpec, ...] = ()
    horizons: Tuple[int, ...] = ()
    eps_budget: int = DEFAULT_EPS_BUDGET
    strict_checkpoint: bool = False
    output: Optional[str] = None


def _naturals(value: Any, name: str, minimum: int) -> List[int]:
    if not isinstance(value, list):
        raise ConfigError(f"{name} must be a list")
    out = []
    for item in value:
        n = coerce_natural(item, minimum)
        if n is None or isinstance(item, str):
            raise ConfigError(f"{name} entries must be integers >= {minimum}, got {item!r}")
        out.append(n)
    return out


def _params(value: Any) -> List[int]:
    if isinstance(value, dict):
        lo = coerce_natural(value.get("from"), 1)
        hi = coerce_natural(value.get("to"), 1)
        if lo is None or hi is None:
            raise ConfigError("params range needs positive integers from and to")
        return list(range(lo, hi + 1))
    return _naturals(value, "params", 1)


def _tokens(value: Any, family: str) -> List[TokenSpec]:
    if value is None:
        return []
    if not isinstance(value, list):
        raise ConfigError("tokens must be a list")
    out: List[TokenSpec] = []
    for item in value:
        if isinstance(item, str) and item in TOKEN_NAMES:
            if item.startswith("param") and not needs_param(family):
                raise ConfigError(f"token count {item} needs a parameterised family")
            out.append(item)
            continue
        n = coerce_natural(item, 1)
        if n is None or isinstance(item, str):
            raise ConfigError(f"token entries must be positive integers or one of {', '.join(TOKEN_NAMES)}")
        out.append(n)
    return out


def sanitize_experiment(raw: Any) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("experiment config must be an object")
    family = raw.get("family")
    if family not in EXPERIMENT_FAMILIES:
        raise ConfigError(f"family must be one of {', '.join(EXPERIMENT_FAMILIES)}")

    params: List[Optional[int]]
    if needs_param(family):
        params = list(_params(raw.get("params")))
        if not params:
            raise ConfigError(f"family {family} needs a non-empty params range")
    else:
        params = [None]

    tokens = _tokens(raw.get("tokens"), family)
    horizons = _naturals(raw.get("horizons", []), "horizons", 0)
    if tokens and not horizons:
        raise ConfigError("horizons must be non-empty when tokens are given")

    eps_budget = DEFAULT_EPS_BUDGET
    if "eps_budget" in raw:
        eps_budget = coerce_natural(raw["eps_budget"], 1)
        if eps_budget is None:
            raise ConfigError("eps_budget must be a positive integer")
    strict = parse_flag(raw.get("strict_checkpoint", False))
    if strict is None:
        raise ConfigError("strict_checkpoint must be a boolean")
    output = raw.get("output")
    if output is not None and not isinstance(output, str):
        raise ConfigError("output must be a path")

    return ExperimentConfig(family, tuple(params), tuple(tokens), tuple(horizons), eps_budget, strict, output)


def load_experiment(path: str) -> ExperimentConfig:
    try:
        return sanitize_experiment(read_json_document(path))
    except DocumentError as exc:
        raise ConfigError(str(exc)) from exc


def _token_count(spec: TokenSpec, param: Optional[int], horizon: int) -> int:
    if spec == "param":
        return param or 1
    if spec == "param+1":
        return (param or 0) + 1
    if spec == "linear":
        return max(1, horizon)
    return int(spec)


def run_experiment(config: ExperimentConfig, jobs: int = 1) -> List[Dict[str, Any]]:
    rows: List[Dict[str, Any]] = []
    for param in config.params:
        pda = build_family(config.family, param)
        base = {
            "family": config.family,
            "param": "" if param is None else param,
            "states": len(pda.states),
            "stack_symbols": len(pda.stack_alphabet),
            "size": size(pda),
            "transitions": len(pda.transitions),
        }
        if not config.tokens:
            rows.append({**base, "tokens": "", "horizon": "", "verdict": "", "witness": "", "positions": ""})
            continue
        membership = exact_membership(pda)
        for spec in config.tokens:
            for horizon in config.horizons:
                k = _token_count(spec, param, horizon)
                solver = GameSolver(pda, k, horizon, config.eps_budget, membership, config.strict_checkpoint, jobs)
                outcome = solver.solve(announced=horizon if spec == "linear" else None)
                logger.debug("%s param=%s k=%d h=%d: %s", config.family, param, k, horizon, outcome.winner.value)
                rows.append(
                    {
                        **base,
                        "tokens": k,
                        "horizon": horizon,
                        "verdict": outcome.winner.value,
                        "witness": outcome.witness if outcome.witness is not None else "",
                        "positions": outcome.positions,
                    }
                )
    return rows


def write_csv(rows: List[Dict[str, Any]], stream: IO[str]) -> None:
    writer = csv.DictWriter(stream, fieldnames=COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
