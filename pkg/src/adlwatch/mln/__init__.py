"""Markov-logic engine: typed weighted-formula programs, grounding, exact and
local-search MAP inference, and perceptron weight learning."""
from .model import (
    Atom,
    Builtin,
    Const,
    Formula,
    Literal,
    MlnProgram,
    Signature,
    SoftFormula,
    Var,
)
from .parser import parse_program, serialize_program
from .grounding import GroundNetwork, ground
from .solve import MapState, SearchParams, map_exact, map_search, solve_auto
from .learn import learn_weights

__all__ = [
    "Atom", "Builtin", "Const", "Formula", "Literal", "MlnProgram",
    "Signature", "SoftFormula", "Var", "parse_program", "serialize_program",
    "GroundNetwork", "ground", "MapState", "SearchParams", "map_exact",
    "map_search", "solve_auto", "learn_weights",
]
