"""Symbolic descriptions of infinite multisets of positive integers.

A :class:`SequenceDescriptor` is a finite prefix plus a tail generator and
denotes the sequence ``prefix[0], ..., prefix[-1], tail(0), tail(1), ...``.
It is the exact representation used for cycle-length multisets of rotary
(finite-orbit) almost permutations: the k-th entry is the length of the k-th
finite orbit.

Tail generators are total: ``value(j)`` is defined for every j >= 0.  For
``ResidueTail`` only the residues modulo the table's modulus are actually
specified; ``value`` returns the minimal representative consistent with the
table, and deciders that would need true magnitudes must treat such
descriptors as underdetermined.

All residue computations are exact.  Every supported tail has an eventually
periodic residue sequence modulo every m, returned as (preperiod, cycle).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple, Union

from .core import MergeError, SelectorError


@dataclass(frozen=True)
class EmptyTail:
    """No tail: the descriptor denotes the finite prefix only."""

    kind = "empty"

    def value(self, j: int) -> int:
        raise IndexError("empty tail has no values")

    def residues(self, m: int) -> Tuple[list, list]:
        return [], []


@dataclass(frozen=True)
class ConstantTail:
    kind = "constant"
    value_: int

    def __post_init__(self):
        if self.value_ < 1:
            raise ValueError("constant tail value must be >= 1")

    def value(self, j: int) -> int:
        return self.value_

    def residues(self, m: int) -> Tuple[list, list]:
        return [], [self.value_ % m]


@dataclass(frozen=True)
class AffineTail:
    """j -> slope * j + intercept, with slope >= 0 and all values >= 1."""

    kind = "affine"
    slope: int
    intercept: int

    def __post_init__(self):
        if self.slope < 0:
            raise ValueError("affine slope must be >= 0")
        if self.intercept < 1:
            raise ValueError("affine intercept must be >= 1 so that all values are >= 1")

    def value(self, j: int) -> int:
        return self.slope * j + self.intercept

    def residues(self, m: int) -> Tuple[list, list]:
        period = m // math.gcd(self.slope, m) if self.slope else 1
        return [], [(self.slope * t + self.intercept) % m for t in range(period)]


@dataclass(frozen=True)
class GeometricTail:
    """j -> coefficient * ratio**j with ratio >= 2, coefficient >= 1."""

    kind = "geometric"
    coefficient: int
    ratio: int

    def __post_init__(self):
        if self.ratio < 2:
            raise ValueError("geometric ratio must be >= 2")
        if self.coefficient < 1:
            raise ValueError("geometric coefficient must be >= 1")

    def value(self, j: int) -> int:
        return self.coefficient * self.ratio**j

    def residues(self, m: int) -> Tuple[list, list]:
        # Iterate a * r^t mod m with first-repeat detection.
        seen: dict[int, int] = {}
        seq: list[int] = []
        x = self.coefficient % m
        r = self.ratio % m
        while x not in seen:
            seen[x] = len(seq)
            seq.append(x)
            x = (x * r) % m
        start = seen[x]
        return seq[:start], seq[start:]


@dataclass(frozen=True)
class FactorialTail:
    """j -> (j + offset)!"""

    kind = "factorial"
    offset: int

    def __post_init__(self):
        if self.offset < 0:
            raise ValueError("factorial offset must be >= 0")

    def value(self, j: int) -> int:
        return math.factorial(j + self.offset)

    def residues(self, m: int) -> Tuple[list, list]:
        # (j + offset)! is divisible by m once j + offset >= m.
        pre = []
        t = 0
        while t + self.offset < m:
            pre.append(math.factorial(t + self.offset) % m)
            t += 1
        return pre, [0]


@dataclass(frozen=True)
class ResidueTail:
    """Cyclic residue table: entry j has residue table[j mod len] modulo modulus.

    Magnitudes are unconstrained above ``floor``; ``value`` returns the
    minimal representative >= max(1, floor).  Deciders must not read more
    than the residues into these values.
    """

    kind = "residue_table"
    modulus: int
    table: Tuple[int, ...]
    floor: int = 0

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError("modulus must be >= 1")
        if not self.table:
            raise ValueError("residue table must be nonempty")
        if any(not (0 <= r < self.modulus) for r in self.table):
            raise ValueError("table entries must lie in [0, modulus)")
        object.__setattr__(self, "table", tuple(self.table))

    def value(self, j: int) -> int:
        r = self.table[j % len(self.table)]
        lo = max(1, self.floor)
        # Least v >= lo with v congruent to r mod modulus.
        v = r + self.modulus * ((lo - r + self.modulus - 1) // self.modulus)
        if v < lo:
            v += self.modulus
        return v

    def residues(self, m: int) -> Tuple[list, list]:
        return [], [self.value(t) % m for t in range(len(self.table))]


Tail = Union[EmptyTail, ConstantTail, AffineTail, GeometricTail, FactorialTail, ResidueTail]

TAIL_KINDS = {
    "empty": EmptyTail,
    "constant": ConstantTail,
    "affine": AffineTail,
    "geometric": GeometricTail,
    "factorial": FactorialTail,
    "residue_table": ResidueTail,
}


@dataclass(frozen=True)
class SequenceDescriptor:
    """Finite prefix followed by a symbolic tail."""

    prefix: Tuple[int, ...] = ()
    tail: Tail = EmptyTail()

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(self.prefix))
        if any(v < 1 for v in self.prefix):
            raise ValueError("all prefix entries must be >= 1")

    @property
    def is_finite(self) -> bool:
        return isinstance(self.tail, EmptyTail)

    def value(self, k: int) -> int:
        if k < 0:
            raise IndexError("negative index")
        if k < len(self.prefix):
            return self.prefix[k]
        return self.tail.value(k - len(self.prefix))

    def values(self, count: int, start: int = 0) -> list[int]:
        """First ``count`` entries from position ``start`` (finite descriptors
        may return fewer)."""
        out = []
        for k in range(start, start + count):
            if self.is_finite and k >= len(self.prefix):
                break
            out.append(self.value(k))
        return out

    def tail_residues(self, m: int) -> Tuple[list, list]:
        """(preperiod, cycle) of tail values modulo m; prefix excluded."""
        if m < 1:
            raise ValueError("modulus must be >= 1")
        return self.tail.residues(m)

    def subsample(self, start: int, step: int) -> "SequenceDescriptor":
        """Tail restricted to indices start, start+step, ... as a new tail.

        The prefix is dropped (a finite difference); raises
        :class:`SelectorError` when the restriction is not expressible in the
        supported tail classes.
        """
        if start < 0 or step < 1:
            raise ValueError("need start >= 0 and step >= 1")
        t = self.tail
        if isinstance(t, EmptyTail):
            return SequenceDescriptor((), EmptyTail())
        if isinstance(t, ConstantTail):
            return SequenceDescriptor((), t)
        if isinstance(t, AffineTail):
            return SequenceDescriptor(
                (), AffineTail(t.slope * step, t.slope * start + t.intercept)
            )
        if isinstance(t, GeometricTail):
            return SequenceDescriptor(
                (), GeometricTail(t.coefficient * t.ratio**start, t.ratio**step)
            )
        if isinstance(t, FactorialTail):
            if step == 1:
                return SequenceDescriptor((), FactorialTail(t.offset + start))
            raise SelectorError("factorial tails only support step-1 subsampling")
        if isinstance(t, ResidueTail):
            period = len(t.table) // math.gcd(step, len(t.table))
            table = tuple(t.table[(start + u * step) % len(t.table)] for u in range(period))
            return SequenceDescriptor((), ResidueTail(t.modulus, table, t.floor))
        raise SelectorError(f"unsupported tail {t!r}")

    def to_json(self) -> dict:
        t = self.tail
        tail: dict
        if isinstance(t, EmptyTail):
            tail = {"kind": "empty"}
        elif isinstance(t, ConstantTail):
            tail = {"kind": "constant", "value": t.value_}
        elif isinstance(t, AffineTail):
            tail = {"kind": "affine", "slope": t.slope, "intercept": t.intercept}
        elif isinstance(t, GeometricTail):
            tail = {"kind": "geometric", "coefficient": t.coefficient, "ratio": t.ratio}
        elif isinstance(t, FactorialTail):
            tail = {"kind": "factorial", "offset": t.offset}
        elif isinstance(t, ResidueTail):
            tail = {
                "kind": "residue_table",
                "modulus": t.modulus,
                "table": list(t.table),
                "floor": t.floor,
            }
        else:
            raise TypeError(f"unknown tail {t!r}")
        return {"prefix": list(self.prefix), "tail": tail}

    @staticmethod
    def from_json(obj: dict) -> "SequenceDescriptor":
        prefix = tuple(obj.get("prefix", ()))
        tobj = dict(obj.get("tail", {"kind": "empty"}))
        kind = tobj.pop("kind", "empty")
        if kind == "empty":
            tail: Tail = EmptyTail()
        elif kind == "constant":
            tail = ConstantTail(tobj["value"])
        elif kind == "affine":
            tail = AffineTail(tobj["slope"], tobj["intercept"])
        elif kind == "geometric":
            tail = GeometricTail(tobj["coefficient"], tobj["ratio"])
        elif kind == "factorial":
            tail = FactorialTail(tobj["offset"])
        elif kind == "residue_table":
            tail = ResidueTail(tobj["modulus"], tuple(tobj["table"]), tobj.get("floor", 0))
        else:
            raise ValueError(f"unknown tail kind {kind!r}")
        return SequenceDescriptor(prefix, tail)


def finite_descriptor(values: Iterable[int]) -> SequenceDescriptor:
    return SequenceDescriptor(tuple(sorted(values)), EmptyTail())


def merge_descriptors(
    a: SequenceDescriptor,
    b: SequenceDescriptor,
    fallback_modulus: Optional[int] = None,
) -> SequenceDescriptor:
    """Multiset union of two descriptors, canonicalized.

    Exact cases: a tail may be empty (absorbed into the prefix), equal
    constant tails merge, and residue tables over the same modulus and floor
    interleave.  Any other pair of infinite tails has no exact representation
    in the descriptor language; with ``fallback_modulus`` m the merge degrades
    explicitly to a ResidueTail that records only residues mod m, otherwise a
    :class:`MergeError` is raised.  The prefix is kept sorted.
    """
    prefix = sorted(a.prefix + b.prefix)
    ta, tb = a.tail, b.tail
    if isinstance(ta, EmptyTail) and isinstance(tb, EmptyTail):
        return SequenceDescriptor(tuple(prefix), EmptyTail())
    if isinstance(ta, EmptyTail):
        return SequenceDescriptor(tuple(prefix), tb)
    if isinstance(tb, EmptyTail):
        return SequenceDescriptor(tuple(prefix), ta)
    if isinstance(ta, ConstantTail) and isinstance(tb, ConstantTail) and ta == tb:
        return SequenceDescriptor(tuple(prefix), ta)
    if (
        isinstance(ta, ResidueTail)
        and isinstance(tb, ResidueTail)
        and ta.modulus == tb.modulus
        and ta.floor == tb.floor
    ):
        period = len(ta.table) * len(tb.table) // math.gcd(len(ta.table), len(tb.table))
        table = []
        for u in range(period):
            table.append(ta.table[u % len(ta.table)])
            table.append(tb.table[u % len(tb.table)])
        return SequenceDescriptor(tuple(prefix), ResidueTail(ta.modulus, tuple(table), ta.floor))
    if fallback_modulus is not None:
        m = fallback_modulus
        if m < 1:
            raise ValueError("fallback modulus must be >= 1")
        pre_a, cyc_a = ta.residues(m)
        pre_b, cyc_b = tb.residues(m)
        # Preperiod entries are concrete values; move them into the prefix.
        prefix += [ta.value(t) for t in range(len(pre_a))]
        prefix += [tb.value(t) for t in range(len(pre_b))]
        period = len(cyc_a) * len(cyc_b) // math.gcd(len(cyc_a), len(cyc_b))
        table = []
        for u in range(period):
            table.append(cyc_a[u % len(cyc_a)])
            table.append(cyc_b[u % len(cyc_b)])
        return SequenceDescriptor(tuple(sorted(prefix)), ResidueTail(m, tuple(table)))
    raise MergeError(
        f"no exact representation for merge of {ta.kind} and {tb.kind} tails; "
        "pass fallback_modulus for an explicit residue-only merge"
    )
