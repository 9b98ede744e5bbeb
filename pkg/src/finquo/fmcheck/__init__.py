"""Finite model checking for the dynamical Boolean algebras <P(n), rotate>.

Submodules: :mod:`formulas` (AST and s-expression syntax), :mod:`engine`
(evaluation by quantifier expansion, with a compiled kernel when available),
:mod:`hintikka` (rank-d types, limit type sets, reduced-product elementary
equivalence), :mod:`obstruction` (residue sentences and their window-scale
witnesses).
"""

from .engine import FiniteDynSys, active_backend, eval_sentence
from .formulas import parse_formula, to_sexpr

__all__ = [
    "FiniteDynSys",
    "active_backend",
    "eval_sentence",
    "parse_formula",
    "to_sexpr",
]
