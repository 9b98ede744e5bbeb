"""Rank-bounded elementary-equivalence fingerprints for rotation powersets.

The rank-0 type of a tuple of subsets is its atomic diagram over a fixed
basis of terms (meets, joins, complements, rotation powers up to a depth
bound): which basis terms coincide and which are contained in which.  The
rank k+1 type is the set of rank-k types reachable by extending the tuple
with one more subset.  Types are hash-consed, so equality of type ids is
elementary equivalence up to the given rank and term depth.

Limit type sets summarise the types of the cycle sizes along an infinite
size sequence.  The summary is window evidence; a periodicity certificate
is only marked structural when the size sequence itself is exactly
periodic and one full period plus one repeat fits in the window, which
makes the observed repetition provably permanent.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from ..core import Budget, DEFAULT_BUDGET, Tri
from ..descriptors import (
    AffineTail,
    ConstantTail,
    EmptyTail,
    ResidueTail,
    SequenceDescriptor,
    SelectorError,
)
from .engine import eval_term_values, necklace_reps, active_backend

OP_PUSH0, OP_PUSH1, OP_PUSHV, OP_MEET, OP_JOIN, OP_COMP, OP_ROT, OP_PUSHT = range(8)

DEFAULT_TERM_DEPTH = 2
DEFAULT_WINDOW = (0, 24)


# ---------------------------------------------------------------------------
# Term basis.

@lru_cache(maxsize=None)
def _basis(arity: int, depth: int):
    """Deduplicated term basis over `arity` variables, as batch programs.

    Entries are (kind, a, b, power) with a, b indices of earlier entries,
    so the term programs can reuse computed values via OP_PUSHT.
    """
    entries: List[Tuple[str, int, int, int]] = []
    depths: List[int] = []
    seen: Dict[Tuple[str, int, int, int], int] = {}

    def intern(kind: str, a: int = -1, b: int = -1, p: int = 0, d: int = 0) -> int:
        key = (kind, a, b, p)
        if key in seen:
            return seen[key]
        seen[key] = len(entries)
        entries.append(key)
        depths.append(d)
        return len(entries) - 1

    intern("0")
    intern("1")
    for i in range(arity):
        intern("v", a=i)

    for _ in range(depth):
        snapshot = len(entries)
        for i in range(snapshot):
            kind, a, b, p = entries[i]
            d = depths[i]
            # complement: skip constants and double complement
            if kind not in ("0", "1", "c") and d + 1 <= depth:
                intern("c", a=i, d=d + 1)
            # rotation commutes with complement and composes with itself,
            # so apply it to variables and lattice terms only
            if kind in ("v", "m", "j"):
                for power in range(-(depth - d), depth - d + 1):
                    if power != 0:
                        intern("r", a=i, p=power, d=d + abs(power))
        snapshot = len(entries)
        for i in range(snapshot):
            ki, ai, bi, pi = entries[i]
            if ki in ("0", "1"):
                continue
            for j in range(i + 1, snapshot):
                kj = entries[j][0]
                if kj in ("0", "1"):
                    continue
                d = max(depths[i], depths[j]) + 1
                if d <= depth:
                    intern("m", a=i, b=j, d=d)
                    intern("j", a=i, b=j, d=d)

    tops: List[int] = []
    targ: List[int] = []
    tstart: List[int] = []
    tlen: List[int] = []
    for kind, a, b, p in entries:
        start = len(tops)
        if kind == "0":
            tops.append(OP_PUSH0)
            targ.append(0)
        elif kind == "1":
            tops.append(OP_PUSH1)
            targ.append(0)
        elif kind == "v":
            tops.append(OP_PUSHV)
            targ.append(a)
        elif kind == "c":
            tops.extend((OP_PUSHT, OP_COMP))
            targ.extend((a, 0))
        elif kind == "r":
            tops.extend((OP_PUSHT, OP_ROT))
            targ.extend((a, p))
        else:
            tops.extend((OP_PUSHT, OP_PUSHT, OP_MEET if kind == "m" else OP_JOIN))
            targ.extend((a, b, 0))
        tstart.append(start)
        tlen.append(len(tops) - start)

    arr = lambda xs: np.asarray(xs, dtype=np.int64)
    return arr(tops), arr(targ), arr(tstart), arr(tlen)


def basis_size(arity: int, depth: int = DEFAULT_TERM_DEPTH) -> int:
    return int(len(_basis(arity, depth)[2]))


# ---------------------------------------------------------------------------
# Hash-consed types.

_KEYS: List[tuple] = []
_IDS: Dict[tuple, int] = {}
_HASHES: List[str] = []


def _intern_type(key: tuple) -> int:
    tid = _IDS.get(key)
    if tid is not None:
        return tid
    tid = len(_KEYS)
    _IDS[key] = tid
    _KEYS.append(key)
    if key[0] == "atom":
        digest = hashlib.sha256(("atom|" + repr(key[1:])).encode()).hexdigest()
    else:
        child_hashes = sorted(_HASHES[c] for c in key[2])
        digest = hashlib.sha256(
            ("node|%d|" % key[1] + ",".join(child_hashes)).encode()
        ).hexdigest()
    _HASHES.append(digest)
    return tid


@dataclass(frozen=True)
class HintikkaType:
    """Interned elementary-equivalence class at a given rank and term depth."""

    rank: int
    term_depth: int
    tid: int

    @property
    def content_hash(self) -> str:
        return _HASHES[self.tid]

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "termDepth": self.term_depth,
            "hash": self.content_hash,
        }


def _diagram_key(n: int, env: Tuple[int, ...], term_depth: int, backend: Optional[str]) -> tuple:
    arity = len(env)
    tops, targ, tstart, tlen = _basis(arity, term_depth)
    env_arr = np.asarray(env if env else (0,), dtype=np.int64)
    values = eval_term_values(tops, targ, tstart, tlen, env_arr, n, backend).tolist()
    first: Dict[int, int] = {}
    order: List[int] = []
    class_ids = []
    for v in values:
        c = first.get(v)
        if c is None:
            c = len(order)
            first[v] = c
            order.append(v)
        class_ids.append(c)
    nd = len(order)
    bits = 0
    for i, vi in enumerate(order):
        row = i * nd
        for j, vj in enumerate(order):
            if i != j and vi & ~vj == 0:
                bits |= 1 << (row + j)
    return ("atom", term_depth, arity, tuple(class_ids), bits)


def _type_id(n: int, env: Tuple[int, ...], d: int, term_depth: int,
             symmetry: bool, backend: Optional[str]) -> int:
    if d == 0:
        return _intern_type(_diagram_key(n, env, term_depth, backend))
    if symmetry and not env:
        extensions = necklace_reps(n).tolist()
    else:
        extensions = range(1 << n)
    kids = frozenset(
        _type_id(n, env + (a,), d - 1, term_depth, symmetry, backend)
        for a in extensions
    )
    return _intern_type(("node", d, kids))


_TYPE_CACHE: Dict[Tuple[int, int, int, bool, Optional[str]], int] = {}


def hintikka_type(n: int, rank: int, term_depth: int = DEFAULT_TERM_DEPTH,
                  budget: Budget = DEFAULT_BUDGET, symmetry: bool = True,
                  backend: Optional[str] = None) -> HintikkaType:
    """Rank-`rank` type of <P(n), rotate> over the bounded term basis."""
    if rank < 0:
        raise ValueError("rank must be >= 0")
    budget.check_eval(n, rank)
    key = (n, rank, term_depth, symmetry, backend)
    tid = _TYPE_CACHE.get(key)
    if tid is None:
        tid = _type_id(n, (), rank, term_depth, symmetry, backend)
        _TYPE_CACHE[key] = tid
    return HintikkaType(rank=rank, term_depth=term_depth, tid=tid)


def ef_equal(n: int, m: int, rank: int, term_depth: int = DEFAULT_TERM_DEPTH,
             budget: Budget = DEFAULT_BUDGET, symmetry: bool = True) -> bool:
    """Whether P(n) and P(m) share their rank-bounded type."""
    ta = hintikka_type(n, rank, term_depth, budget, symmetry)
    tb = hintikka_type(m, rank, term_depth, budget, symmetry)
    return ta.tid == tb.tid


def fingerprint(n: int, rank: int, term_depth: int = DEFAULT_TERM_DEPTH,
                budget: Budget = DEFAULT_BUDGET) -> dict:
    t = hintikka_type(n, rank, term_depth, budget)
    return {
        "schemaVersion": 1,
        "n": n,
        "rank": rank,
        "termDepth": term_depth,
        "hash": t.content_hash,
        "backend": active_backend(),
    }


# ---------------------------------------------------------------------------
# Limit type sets along a size sequence.

@dataclass(frozen=True)
class PeriodicTail:
    """Observed repetition of the type sequence, with provenance.

    `structural` means the underlying size sequence is exactly periodic and
    the window contains a full size period plus one overlap, so the observed
    repetition holds for every tail index, not just the window.
    """

    period: int
    onset: int
    repeats: int
    structural: bool
    note: str = ""

    def to_json(self) -> dict:
        return {
            "kind": "periodic",
            "period": self.period,
            "onset": self.onset,
            "repeats": self.repeats,
            "structural": self.structural,
            "note": self.note,
        }


@dataclass(frozen=True)
class WindowOnly:
    """No admissible repetition was observed inside the window."""

    note: str = ""

    def to_json(self) -> dict:
        return {"kind": "window_only", "note": self.note}


Certificate = Union[PeriodicTail, WindowOnly]


@dataclass(frozen=True)
class LimitTypeSet:
    rank: int
    term_depth: int
    window: Tuple[int, int]
    sizes: Tuple[int, ...]
    observed: Tuple[str, ...]
    types: Tuple[HintikkaType, ...]
    certificate: Certificate

    @property
    def type_hashes(self) -> Tuple[str, ...]:
        return tuple(sorted({t.content_hash for t in self.types}))

    def to_json(self) -> dict:
        return {
            "schemaVersion": 1,
            "rank": self.rank,
            "termDepth": self.term_depth,
            "window": list(self.window),
            "sizes": list(self.sizes),
            "observed": list(self.observed),
            "typeHashes": list(self.type_hashes),
            "certificate": self.certificate.to_json(),
        }


def _intrinsic_period(tail) -> Optional[int]:
    if isinstance(tail, ConstantTail):
        return 1
    if isinstance(tail, AffineTail) and tail.slope == 0:
        return 1
    if isinstance(tail, ResidueTail):
        return len(tail.table)
    return None


def limit_type_set(seq: SequenceDescriptor, rank: int,
                   window: Optional[Tuple[int, int]] = None,
                   term_depth: int = DEFAULT_TERM_DEPTH,
                   budget: Budget = DEFAULT_BUDGET,
                   min_repeats: int = 3) -> LimitTypeSet:
    """Types of the tail sizes over a window, with a periodicity verdict.

    Raises BudgetExceededError when a window size is out of budget, and
    ValueError when the descriptor has no infinite tail.
    """
    if isinstance(seq.tail, EmptyTail):
        raise ValueError("finite size sequence has no limit types")
    if window is None:
        window = DEFAULT_WINDOW
    w0, w1 = window
    if not (0 <= w0 < w1):
        raise ValueError("window must be a nonempty range of tail indices")
    sizes = [seq.tail.value(j) for j in range(w0, w1)]
    types = [hintikka_type(s, rank, term_depth, budget) for s in sizes]
    ids = [t.tid for t in types]
    L = len(ids)

    intrinsic = _intrinsic_period(seq.tail)
    best: Optional[PeriodicTail] = None
    for p in range(1, L // max(min_repeats, 1) + 1):
        violation = -1
        for i in range(L - p):
            if ids[i] != ids[i + p]:
                violation = i
        onset_rel = violation + 1
        span = L - onset_rel
        if span < min_repeats * p:
            continue
        structural = (
            intrinsic is not None
            and onset_rel == 0
            and L >= intrinsic + p
        )
        if structural:
            note = f"size sequence repeats exactly with period {intrinsic}"
        else:
            note = "repetition observed in window only"
        best = PeriodicTail(period=p, onset=w0 + onset_rel,
                            repeats=span // p, structural=structural, note=note)
        break

    if best is not None:
        tail_types = types[best.onset - w0:]
        distinct = {t.content_hash: t for t in tail_types}
        cert: Certificate = best
    else:
        distinct = {t.content_hash: t for t in types}
        cert = WindowOnly(note="no admissible period in window")
    ordered = tuple(distinct[h] for h in sorted(distinct))
    return LimitTypeSet(
        rank=rank,
        term_depth=term_depth,
        window=(w0, w1),
        sizes=tuple(sizes),
        observed=tuple(t.content_hash for t in types),
        types=ordered,
        certificate=cert,
    )


def reduced_product_ee(a: SequenceDescriptor, b: SequenceDescriptor, rank: int,
                       window: Optional[Tuple[int, int]] = None,
                       term_depth: int = DEFAULT_TERM_DEPTH,
                       budget: Budget = DEFAULT_BUDGET) -> Tri:
    """Compare limit type sets of two infinite size sequences.

    Equal descriptors are equivalent by reflexivity.  Beyond that, Yes and
    No verdicts are issued only on structural periodicity certificates for
    both sides; anything weaker stays Unknown.
    """
    from ..core import BudgetExceededError

    if a == b:
        return Tri.yes("identical size sequences", rank=rank, termDepth=term_depth)
    try:
        la = limit_type_set(a, rank, window, term_depth, budget)
        lb = limit_type_set(b, rank, window, term_depth, budget)
    except BudgetExceededError as err:
        return Tri.unknown("window size exceeded evaluation budget", error=str(err))
    certified = (
        isinstance(la.certificate, PeriodicTail) and la.certificate.structural
        and isinstance(lb.certificate, PeriodicTail) and lb.certificate.structural
    )
    sa, sb = set(la.type_hashes), set(lb.type_hashes)
    detail = {
        "rank": rank,
        "termDepth": term_depth,
        "left": la.to_json(),
        "right": lb.to_json(),
    }
    if not certified:
        return Tri.unknown(
            "no structural periodicity certificate for the limit type sets",
            **detail,
        )
    if sa == sb:
        return Tri.yes("certified limit type sets coincide", **detail)
    return Tri.no(
        "certified limit type sets differ",
        only_left=sorted(sa - sb),
        only_right=sorted(sb - sa),
        **detail,
    )


@dataclass(frozen=True)
class GhasemiReport:
    """Largest type class along the tail, as a candidate subsequence."""

    rank: int
    term_depth: int
    window: Tuple[int, int]
    classes: Tuple[Tuple[str, Tuple[int, ...]], ...]
    chosen_hash: str
    chosen_indices: Tuple[int, ...]
    derived: Optional[SequenceDescriptor]
    certificate: Certificate

    def to_json(self) -> dict:
        return {
            "schemaVersion": 1,
            "rank": self.rank,
            "termDepth": self.term_depth,
            "window": list(self.window),
            "classes": [
                {"hash": h, "indices": list(ix)} for h, ix in self.classes
            ],
            "chosenHash": self.chosen_hash,
            "chosenIndices": list(self.chosen_indices),
            "derived": self.derived.to_json() if self.derived else None,
            "certificate": self.certificate.to_json(),
        }


def ghasemi_subsequence(seq: SequenceDescriptor, rank: int = 1,
                        window: Optional[Tuple[int, int]] = None,
                        term_depth: int = DEFAULT_TERM_DEPTH,
                        budget: Budget = DEFAULT_BUDGET) -> GhasemiReport:
    """Pick the largest single-type class of tail indices in the window.

    When the chosen indices form an arithmetic progression the matching
    subsampled descriptor is attached, so the caller gets a genuine size
    sequence concentrated on one type.
    """
    lts = limit_type_set(seq, rank, window, term_depth, budget)
    w0, _ = lts.window
    groups: Dict[str, List[int]] = {}
    for pos, h in enumerate(lts.observed):
        groups.setdefault(h, []).append(w0 + pos)
    classes = tuple(
        sorted(
            ((h, tuple(ix)) for h, ix in groups.items()),
            key=lambda kv: (-len(kv[1]), kv[0]),
        )
    )
    chosen_hash, chosen = classes[0]
    derived: Optional[SequenceDescriptor] = None
    if len(chosen) >= 2:
        steps = {chosen[i + 1] - chosen[i] for i in range(len(chosen) - 1)}
        if len(steps) == 1:
            step = steps.pop()
            try:
                derived = seq.subsample(chosen[0], step)
            except SelectorError:
                derived = None
    return GhasemiReport(
        rank=lts.rank,
        term_depth=lts.term_depth,
        window=lts.window,
        classes=classes,
        chosen_hash=chosen_hash,
        chosen_indices=chosen,
        derived=derived,
        certificate=lts.certificate,
    )
