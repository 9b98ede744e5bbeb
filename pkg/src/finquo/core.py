"""Shared small types: the absorbing cardinal omega, tri-valued verdicts,
evaluation budgets and the error taxonomy.

Decision procedures in this package return :class:`Tri` rather than bool.
A ``yes``/``no`` verdict always carries a named witness or obstruction; an
``unknown`` verdict carries the reason the search was inconclusive.  Running
out of budget is an error or an ``unknown``, never a wrong answer.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Union


class Omega:
    """The absorbing infinite count.  A single instance ``OMEGA`` is used."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "omega"

    def __deepcopy__(self, memo):
        return self

    def __reduce__(self):
        return (Omega, ())


OMEGA = Omega()

Count = Union[int, Omega]


def is_omega(x: Count) -> bool:
    return isinstance(x, Omega)


def count_add(a: Count, b: Count) -> Count:
    """Addition on N united with omega; omega absorbs."""
    if is_omega(a) or is_omega(b):
        return OMEGA
    return a + b


def count_min(a: Count, b: Count) -> Count:
    if is_omega(a):
        return b
    if is_omega(b):
        return a
    return min(a, b)


def count_eq(a: Count, b: Count) -> bool:
    if is_omega(a) or is_omega(b):
        return is_omega(a) and is_omega(b)
    return a == b


def count_to_json(x: Count):
    return "omega" if is_omega(x) else x


def count_from_json(x) -> Count:
    if x == "omega":
        return OMEGA
    if isinstance(x, int) and not isinstance(x, bool):
        return x
    raise ValueError(f"expected integer or 'omega', got {x!r}")


YES = "yes"
NO = "no"
UNKNOWN = "unknown"

# Exit codes for scripting mode.
EXIT_CODE = {YES: 0, NO: 1, UNKNOWN: 2}


@dataclass(frozen=True)
class Tri:
    """Tri-valued verdict with a named certificate.

    ``verdict`` is one of ``"yes"``, ``"no"``, ``"unknown"``.  ``reason`` is a
    short machine-readable tag; ``detail`` holds the witness / obstruction /
    diagnostic payload (JSON-serializable values only).
    """

    verdict: str
    reason: str = ""
    detail: dict = field(default_factory=dict)

    @staticmethod
    def yes(reason: str = "", **detail: Any) -> "Tri":
        return Tri(YES, reason, detail)

    @staticmethod
    def no(reason: str = "", **detail: Any) -> "Tri":
        return Tri(NO, reason, detail)

    @staticmethod
    def unknown(reason: str = "", **detail: Any) -> "Tri":
        return Tri(UNKNOWN, reason, detail)

    @property
    def is_yes(self) -> bool:
        return self.verdict == YES

    @property
    def is_no(self) -> bool:
        return self.verdict == NO

    @property
    def is_unknown(self) -> bool:
        return self.verdict == UNKNOWN

    def __bool__(self) -> bool:
        # A Tri must never be used where a bool is expected: "unknown" would
        # silently collapse to a truth value.
        raise TypeError("Tri is tri-valued; test .is_yes / .is_no / .is_unknown")

    @property
    def exit_code(self) -> int:
        return EXIT_CODE[self.verdict]

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "reason": self.reason, "detail": self.detail}


@dataclass(frozen=True)
class Budget:
    """Resource limits for model-checking style computations.

    ``max_universe_bits`` bounds the size parameter n of a finite power-set
    structure (universe 2**n).  ``max_steps`` bounds the quantifier expansion
    cost (2**n)**rank.  Node budgets bound backtracking searches.
    """

    max_universe_bits: int = 14
    max_steps: int = 2**36
    max_nodes: int = 2_000_000

    def check_structure(self, n: int) -> None:
        if n < 1:
            raise ValueError(f"structure size must be >= 1, got {n}")
        if n > self.max_universe_bits:
            raise BudgetExceededError(
                f"universe 2**{n} exceeds budget 2**{self.max_universe_bits}"
            )

    def check_eval(self, n: int, rank: int) -> None:
        self.check_structure(n)
        cost = (2**n) ** max(rank, 0)
        if cost > self.max_steps:
            raise BudgetExceededError(
                f"quantifier expansion cost (2**{n})**{rank} exceeds {self.max_steps}"
            )


DEFAULT_BUDGET = Budget()


class FinquoError(Exception):
    """Base class for package-specific errors."""


class BudgetExceededError(FinquoError):
    """A computation would exceed its configured resource budget."""


class CensoredOrbitError(FinquoError):
    """A window-scale quantity was requested that censored orbits make ambiguous."""


class MergeError(FinquoError):
    """A multiset merge of sequence descriptors has no exact representation."""


class SelectorError(FinquoError):
    """An orbit selector is not expressible on the given descriptor."""


class WitnessPreconditionError(FinquoError):
    """A witness construction's precondition fails; names the offending index."""

    def __init__(self, message: str, k: int):
        super().__init__(message)
        self.k = k
