"""Tools for the classification of trivial automorphisms of P(N)/Fin.

The package works at two scales.  Symbolic objects (orbit spectra, sequence
descriptors) represent almost permutations of N exactly and support exact or
certified-partial decision procedures.  Window objects (finite injective
partial maps, finite unions of cycles) are desk-scale surrogates used for
oracle checks, searches and counterexample hunting; claims derived from them
are labeled as window-scale evidence, never silently promoted.
"""

__version__ = "0.1.0"

from .core import OMEGA, Budget, BudgetExceededError, Tri

__all__ = ["OMEGA", "Budget", "BudgetExceededError", "Tri", "__version__"]
