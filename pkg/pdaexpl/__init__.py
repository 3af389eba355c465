from .automata import Configuration, Pda, Transition, load_pda, make_pda
from .game import GameOutcome, Winner, solve, solve_parameterized
from .grammar import exact_accepts

__all__ = [
    "Configuration",
    "GameOutcome",
    "Pda",
    "Transition",
    "Winner",
    "exact_accepts",
    "load_pda",
    "make_pda",
    "solve",
    "solve_parameterized",
]
