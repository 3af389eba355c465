from __future__ import annotations

import argparse
import logging
import sys
from functools import partial
from typing import Any, Dict, List, Optional

from .automata import (
    AutomatonError,
    dumps_pda,
    format_word,
    load_dfa,
    load_pda,
    product_with_dfa,
    save_pda,
    validate,
)
from .constructions import FAMILIES, ConstructionError, build_family
from .dot_export import to_dot
from .experiment import load_experiment, run_experiment, write_csv
from .game import (
    GameError,
    GameSolver,
    HUMAN_ROLES,
    Transcript,
    Winner,
    play_interactive,
    replay_transcript,
    strategy_to_dict,
    token_function,
)
from .grammar import GrammarError, dump_grammar, exact_accepts, to_cfg, to_empty_stack
from .languages import LanguageError
from .runs import enumerate_runs
from .settings import LOG_LEVELS, ConfigError, load_settings, settings_path, update_settings
from .turing import TuringError, invalc_oracle, load_tm
from .utils import DocumentError, print_error, read_json_document, save_document

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NO = 1
EXIT_USAGE = 2
EXIT_UNKNOWN = 3

PACKAGE_ERRORS = (
    AutomatonError,
    GrammarError,
    ConstructionError,
    TuringError,
    LanguageError,
    GameError,
    ConfigError,
    DocumentError,
)

_GAME_EXIT = {Winner.DETERMINER: EXIT_OK, Winner.SPOILER: EXIT_NO, Winner.UNKNOWN: EXIT_UNKNOWN}


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        print_error(message)
        raise SystemExit(EXIT_USAGE)


def _natural(text: str) -> int:
    try:
        value = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from exc
    if value < 0:
        raise argparse.ArgumentTypeError("expected a non-negative integer")
    return value


def _positive(text: str) -> int:
    value = _natural(text)
    if value < 1:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--verbose", action="store_true", help="log search statistics to stderr")
    common.add_argument("--eps-budget", type=_positive, help="epsilon steps allowed per letter")

    parser = _Parser(prog="pdaexpl", description="Pushdown automata explorability workbench")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("member", parents=[common], help="decide membership of a word")
    p.add_argument("pda")
    p.add_argument("word", nargs="?", default="")
    p.add_argument("--max-nonterminals", type=_positive)

    p = sub.add_parser("runs", parents=[common], help="list the runs of a PDA on a word")
    p.add_argument("pda")
    p.add_argument("word", nargs="?", default="")

    p = sub.add_parser("validate", parents=[common], help="check a PDA document")
    p.add_argument("pda")

    p = sub.add_parser("grammar", parents=[common], help="print the normalized grammar of a PDA")
    p.add_argument("pda")
    p.add_argument("--max-nonterminals", type=_positive)

    p = sub.add_parser("game", parents=[common], help="solve or play the explorability game")
    p.add_argument("pda")
    tokens = p.add_mutually_exclusive_group()
    tokens.add_argument("--tokens", type=_positive)
    tokens.add_argument("--tokens-fn", help="linear, exp or const:K; the horizon is the announced length")
    p.add_argument("--horizon", type=_natural, default=8)
    p.add_argument("--interactive", choices=HUMAN_ROLES)
    p.add_argument("--strict-checkpoint", action="store_true", default=None)
    p.add_argument("--jobs", type=_positive)
    p.add_argument("--oracle-tm", help="decide membership with the invalid-computation oracle of this machine")
    p.add_argument("--strategy-out", help="write the solved strategy table here")
    p.add_argument("--transcript-out", help="write the interactive transcript here")
    p.add_argument("--replay", help="check a saved transcript instead of solving")

    p = sub.add_parser("construct", parents=[common], help="generate a PDA from a family")
    p.add_argument("family", help=", ".join(FAMILIES))
    p.add_argument("--param", "--n", "--i", "--k", dest="param", type=_positive)
    p.add_argument("--tm", help="Turing machine document for the invalc family")
    p.add_argument("--dfa", help="intersect the generated automaton with this DFA document")
    p.add_argument("--out")

    p = sub.add_parser("experiment", parents=[common], help="run a sweep described by a config document")
    p.add_argument("config")
    p.add_argument("--out")
    p.add_argument("--jobs", type=_positive)

    p = sub.add_parser("export-dot", parents=[common], help="print a PDA as a DOT graph")
    p.add_argument("pda")
    p.add_argument("--out")

    p = sub.add_parser("config", parents=[common], help="show or change stored settings")
    p.add_argument("--set", dest="changes", action="append", default=[], metavar="KEY=VALUE")
    return parser


def _configure_logging(verbose: bool, settings: Dict[str, Any]) -> None:
    level = "DEBUG" if verbose else settings.get("log_level", "WARNING")
    if level not in LOG_LEVELS:
        level = "WARNING"
    logging.basicConfig(level=getattr(logging, level), format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    logging.getLogger("pdaexpl").setLevel(getattr(logging, level))


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8") as f:
        f.write(text)


def _cmd_member(args: argparse.Namespace, settings: Dict[str, Any]) -> int:
    pda = load_pda(args.pda)
    accepted = exact_accepts(pda, args.word, args.max_nonterminals or settings["max_nonterminals"])
    print("accept" if accepted else "reject")
    return EXIT_OK if accepted else EXIT_NO


def _cmd_runs(args: argparse.Namespace, settings: Dict[str, Any]) -> int:
    pda = load_pda(args.pda)
    runs = enumerate_runs(pda, args.word, args.eps_budget or settings["eps_budget"])
    for run in sorted(runs, key=lambda r: r.configurations):
        marker = "*" if pda.is_accepting(run.final) else " "
        print(marker + " " + " ".join(str(c) for c in run.configurations))
    print(f"{len(runs)} run(s) on {format_word(args.word)}" + (" (truncated)" if runs.truncated else ""))
    return EXIT_OK


def _cmd_validate(args: argparse.Namespace, settings: Dict[str, Any]) -> int:
    report = validate(load_pda(args.pda, check=False))
    for problem in report.violations:
        print(f"violation: {problem}")
    for state in report.unreachable:
        print(f"unreachable: {state}")
    print(f"deterministic: {'yes' if report.deterministic else 'no'}")
    print(f"epsilon-free: {'yes' if report.epsilon_free else 'no'}")
    return EXIT_OK if report.ok else EXIT_NO


def _cmd_grammar(args: argparse.Namespace, settings: Dict[str, Any]) -> int:
    pda = load_pda(args.pda)
    grammar = to_cfg(to_empty_stack(pda), args.max_nonterminals or settings["max_nonterminals"])
    sys.stdout.write(dump_grammar(grammar))
    return EXIT_OK


def _cmd_game(args: argparse.Namespace, settings: Dict[str, Any]) -> int:
    pda = load_pda(args.pda)
    eps_budget = args.eps_budget or settings["eps_budget"]
    strict = settings["strict_checkpoint"] if args.strict_checkpoint is None else args.strict_checkpoint
    jobs = args.jobs or settings["jobs"]
    membership = None
    if args.oracle_tm:
        tm = load_tm(args.oracle_tm)
        membership = partial(invalc_oracle, tm)

    if args.replay:
        transcript = Transcript.from_dict(read_json_document(args.replay))
        check = replay_transcript(pda, transcript, eps_budget, membership, strict)
        if check.ok:
            print(f"transcript {format_word(transcript.word)} replays without a loss")
            return EXIT_OK
        print(f"transcript loses at {format_word(check.losing_prefix or '')}")
        return EXIT_NO

    k = args.tokens
    announced = None
    if args.tokens_fn:
        announced = args.horizon
        k = token_function(args.tokens_fn, pda)(args.horizon)
    if k is None:
        k = 1
    if k < 1:
        raise GameError(f"token function gives {k} tokens")

    if args.interactive:
        transcript = play_interactive(pda, k, args.interactive, eps_budget, args.horizon, membership, strict)
        if args.transcript_out and not save_document(args.transcript_out, transcript.to_dict()):
            return EXIT_USAGE
        if transcript.result == Winner.SPOILER.value:
            return EXIT_NO
        return EXIT_OK

    solver = GameSolver(pda, k, args.horizon, eps_budget, membership, strict, jobs)
    outcome = solver.solve(announced=announced)
    print(outcome.describe())
    for ply in outcome.principal_variation:
        print(f"  {ply.letter}: " + ", ".join(str(c) if c is not None else "stopped" for c in ply.tokens))
    if outcome.truncated:
        print(f"note: epsilon budget {eps_budget} was reached")
    if args.strategy_out and outcome.winner is Winner.DETERMINER:
        if not save_document(args.strategy_out, strategy_to_dict(solver)):
            return EXIT_USAGE
        print(f"strategy written to {args.strategy_out}")
    return _GAME_EXIT[outcome.winner]


def _cmd_construct(args: argparse.Namespace, settings: Dict[str, Any]) -> int:
    tm = load_tm(args.tm) if args.tm else None
    pda = build_family(args.family, args.param, tm)
    if args.dfa:
        pda = product_with_dfa(pda, load_dfa(args.dfa))
    if args.out is None:
        sys.stdout.write(dumps_pda(pda))
        return EXIT_OK
    if not save_pda(args.out, pda):
        return EXIT_USAGE
    print(f"{args.family}: {len(pda.states)} states, {len(pda.transitions)} transitions -> {args.out}")
    return EXIT_OK


def _cmd_experiment(args: argparse.Namespace, settings: Dict[str, Any]) -> int:
    config = load_experiment(args.config)
    rows = run_experiment(config, args.jobs or settings["jobs"])
    out = args.out or config.output
    if out is None:
        write_csv(rows, sys.stdout)
        return EXIT_OK
    with open(out, "w", encoding="utf-8", newline="") as f:
        write_csv(rows, f)
    print(f"{len(rows)} row(s) written to {out}")
    return EXIT_OK


def _cmd_export_dot(args: argparse.Namespace, settings: Dict[str, Any]) -> int:
    _emit(to_dot(load_pda(args.pda)), args.out)
    return EXIT_OK


def _cmd_config(args: argparse.Namespace, settings: Dict[str, Any]) -> int:
    if args.changes:
        changes = {}
        for item in args.changes:
            key, sep, value = item.partition("=")
            if not sep:
                raise ConfigError(f"expected KEY=VALUE, got {item!r}")
            changes[key.strip()] = value
        update_settings(changes)
        settings = load_settings()
    print(f"# {settings_path()}")
    for key in sorted(settings):
        print(f"{key} = {settings[key]}")
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    settings = load_settings()
    _configure_logging(args.verbose, settings)
    name = args.command
    try:
        if name == "member":
            return _cmd_member(args, settings)
        if name == "runs":
            return _cmd_runs(args, settings)
        if name == "validate":
            return _cmd_validate(args, settings)
        if name == "grammar":
            return _cmd_grammar(args, settings)
        if name == "game":
            return _cmd_game(args, settings)
        if name == "construct":
            return _cmd_construct(args, settings)
        if name == "experiment":
            return _cmd_experiment(args, settings)
        if name == "export-dot":
            return _cmd_export_dot(args, settings)
        if name == "config":
            return _cmd_config(args, settings)
    except PACKAGE_ERRORS as exc:
        print_error(str(exc))
        return EXIT_USAGE
    except OSError as exc:
        print_error(str(exc))
        return EXIT_USAGE
    print_error(f"unknown command {name}")
    return EXIT_USAGE
