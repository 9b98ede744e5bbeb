"""Evaluation of sentences on <P(n), rotate-by-1> by quantifier expansion.

Subsets of an n-cycle are encoded as n-bit masks: meet, join and complement
are bitwise operations, and the automorphism is rotation.  A sentence is
compiled once into flat instruction arrays (postfix term programs plus a
block table for the formula structure) and then interpreted, either by the
compiled extension kernel or by a pure Python interpreter of the same
bytecode.  The kernel is selected at import; set FINQUO_PURE=1 to force the
fallback.

Outermost quantifiers (those not nested under another quantifier) may range
over rotation-orbit representatives only: rotation is an automorphism of the
structure, so with an empty outer assignment the truth of the body is
rotation-invariant.  This symmetry reduction is on by default and validated
against the naive sweep in the test suite.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, Union

import numpy as np

from ..core import Budget, DEFAULT_BUDGET
from . import formulas as F

OP_PUSH0, OP_PUSH1, OP_PUSHV, OP_MEET, OP_JOIN, OP_COMP, OP_ROT, OP_PUSHT = range(8)
K_EQ, K_LE, K_NOT, K_AND, K_OR, K_IMPLIES, K_EXISTS, K_FORALL = range(8)

MAX_VAR_SLOTS = 60


@dataclass(frozen=True)
class FiniteDynSys:
    """The Boolean algebra P({0..n-1}) with the rotation automorphism."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("structure size must be >= 1")

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def rotate(self, mask: int, k: int = 1) -> int:
        s = k % self.n
        if s == 0:
            return mask
        return ((mask << s) | (mask >> (self.n - s))) & self.full

    def subsets(self) -> Iterable[int]:
        return range(1 << self.n)

    def mask_of(self, points: Iterable[int]) -> int:
        m = 0
        for p in points:
            if not 0 <= p < self.n:
                raise ValueError(f"point {p} outside structure of size {self.n}")
            m |= 1 << p
        return m


@dataclass(frozen=True)
class CompiledSentence:
    n_vars: int
    root: int
    qrank: int
    bkind: np.ndarray
    ba: np.ndarray
    bb: np.ndarray
    bc: np.ndarray
    bchild: np.ndarray
    tops: np.ndarray
    targ: np.ndarray
    tstart: np.ndarray
    tlen: np.ndarray


def compile_sentence(f: F.Formula) -> CompiledSentence:
    tops: list[int] = []
    targ: list[int] = []
    tstart: list[int] = []
    tlen: list[int] = []
    bkind: list[int] = []
    ba: list[int] = []
    bb: list[int] = []
    bc: list[int] = []
    bchild: list[int] = []

    def emit_term(t: F.Term, slots: dict) -> None:
        if isinstance(t, F.Zero):
            tops.append(OP_PUSH0)
            targ.append(0)
        elif isinstance(t, F.One):
            tops.append(OP_PUSH1)
            targ.append(0)
        elif isinstance(t, F.Var):
            if t.name not in slots:
                raise ValueError(f"free variable {t.name!r} in sentence")
            tops.append(OP_PUSHV)
            targ.append(slots[t.name])
        elif isinstance(t, F.Meet) or isinstance(t, F.Join):
            emit_term(t.left, slots)
            emit_term(t.right, slots)
            tops.append(OP_MEET if isinstance(t, F.Meet) else OP_JOIN)
            targ.append(0)
        elif isinstance(t, F.Comp):
            emit_term(t.arg, slots)
            tops.append(OP_COMP)
            targ.append(0)
        elif isinstance(t, F.Alpha):
            emit_term(t.arg, slots)
            tops.append(OP_ROT)
            targ.append(t.power)
        else:
            raise TypeError(f"not a term: {t!r}")

    def add_term(t: F.Term, slots: dict) -> int:
        tid = len(tstart)
        start = len(tops)
        emit_term(t, slots)
        tstart.append(start)
        tlen.append(len(tops) - start)
        return tid

    def add_block(kind: int, a: int = 0, b: int = 0, c: int = 0) -> int:
        bkind.append(kind)
        ba.append(a)
        bb.append(b)
        bc.append(c)
        return len(bkind) - 1

    def go(node: F.Formula, slots: dict, under_q: bool) -> int:
        if isinstance(node, F.Eq) or isinstance(node, F.Le):
            t1 = add_term(node.left, slots)
            t2 = add_term(node.right, slots)
            return add_block(K_EQ if isinstance(node, F.Eq) else K_LE, t1, t2)
        if isinstance(node, F.Not):
            return add_block(K_NOT, go(node.arg, slots, under_q))
        if isinstance(node, F.And) or isinstance(node, F.Or):
            ids = [go(g, slots, under_q) for g in node.args]
            start = len(bchild)
            bchild.extend(ids)
            return add_block(K_AND if isinstance(node, F.And) else K_OR, start, len(ids))
        if isinstance(node, F.Implies):
            left = go(node.left, slots, under_q)
            right = go(node.right, slots, under_q)
            return add_block(K_IMPLIES, left, right)
        if isinstance(node, F.Exists) or isinstance(node, F.Forall):
            slot = len(slots)
            if slot >= MAX_VAR_SLOTS:
                raise ValueError("quantifier nesting too deep")
            inner = dict(slots)
            inner[node.var] = slot
            body = go(node.body, inner, True)
            kind = K_EXISTS if isinstance(node, F.Exists) else K_FORALL
            return add_block(kind, slot, body, 0 if under_q else 1)
        raise TypeError(f"not a formula: {node!r}")

    root = go(f, {}, False)
    qrank = F.quantifier_rank(f)
    arr = lambda xs: np.asarray(xs, dtype=np.int64)
    slots_used = [ba[i] for i in range(len(bkind)) if bkind[i] in (K_EXISTS, K_FORALL)]
    n_vars = max(slots_used) + 1 if slots_used else 0
    return CompiledSentence(
        n_vars=n_vars,
        root=root,
        qrank=qrank,
        bkind=arr(bkind),
        ba=arr(ba),
        bb=arr(bb),
        bc=arr(bc),
        bchild=arr(bchild),
        tops=arr(tops),
        targ=arr(targ),
        tstart=arr(tstart),
        tlen=arr(tlen),
    )


# ---------------------------------------------------------------------------
# Backend selection.

_FORCED_PURE = bool(os.environ.get("FINQUO_PURE"))
_COMPILED = None
if not _FORCED_PURE:
    try:
        from . import _evalcore as _COMPILED  # type: ignore[attr-defined]
    except ImportError:
        _COMPILED = None
from . import _evalcore_py as _PYKERNEL


def active_backend() -> str:
    return "compiled" if _COMPILED is not None else "python"


def _kernel(backend: Optional[str]):
    if backend is None:
        return _COMPILED if _COMPILED is not None else _PYKERNEL
    if backend == "compiled":
        if _COMPILED is None:
            raise RuntimeError("compiled kernel not available")
        return _COMPILED
    if backend == "python":
        return _PYKERNEL
    raise ValueError(f"unknown backend {backend!r}")


@lru_cache(maxsize=32)
def necklace_reps(n: int) -> np.ndarray:
    """Masks that are minimal among their rotations (orbit representatives)."""
    sys = FiniteDynSys(n)
    reps = []
    for m in range(1 << n):
        best = m
        x = m
        for _ in range(n - 1):
            x = sys.rotate(x, 1)
            if x < best:
                best = x
                break
        if best == m:
            # confirm minimality over the whole orbit
            x = m
            minimal = True
            for _ in range(n - 1):
                x = sys.rotate(x, 1)
                if x < m:
                    minimal = False
                    break
            if minimal:
                reps.append(m)
    return np.asarray(reps, dtype=np.int64)


_EMPTY = np.zeros(0, dtype=np.int64)


def eval_sentence(
    f: Union[F.Formula, CompiledSentence],
    n: int,
    budget: Budget = DEFAULT_BUDGET,
    symmetry: bool = True,
    backend: Optional[str] = None,
) -> bool:
    """Truth of a closed formula on <P(n), rotate>, within budget."""
    cs = f if isinstance(f, CompiledSentence) else compile_sentence(f)
    budget.check_eval(n, cs.qrank)
    kern = _kernel(backend)
    reps = necklace_reps(n) if symmetry else _EMPTY
    return bool(
        kern.eval_compiled(
            cs.bkind, cs.ba, cs.bb, cs.bc, cs.bchild,
            cs.tops, cs.targ, cs.tstart, cs.tlen,
            cs.root, cs.n_vars, n, reps, 1 if symmetry else 0,
        )
    )


def eval_term_values(
    tops: np.ndarray,
    targ: np.ndarray,
    tstart: np.ndarray,
    tlen: np.ndarray,
    env: np.ndarray,
    n: int,
    backend: Optional[str] = None,
) -> np.ndarray:
    """Evaluate a shared term basis over the given assignment.

    Programs may use OP_PUSHT to reuse the value of an earlier basis term;
    evaluation is in index order.
    """
    out = np.zeros(len(tstart), dtype=np.int64)
    _kernel(backend).eval_terms(tops, targ, tstart, tlen, env, n, out)
    return out
