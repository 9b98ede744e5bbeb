"""Arithmetic residue obstructions for disjoint sums of cycles.

For m >= 1 and 0 <= j < m there is a first-order sentence, over the
powerset of a disjoint sum of cycles with the shift map, that holds exactly
when every cycle length is congruent to j modulo m (window-exactly here;
"all but finitely many" in the mod-finite limit).  The sentence posits a
partition b_0..b_{m-1}, a_0..a_{j-1} of the space in which the shift steps
cyclically through the b's, each a meets every cycle in a single point, and
each b meets every cycle.  Counting points interval by interval then forces
length = j + m * |b_0 ∩ I| on each interval I.

This module emits the sentence (and its relativized variants for the
"eventual" and "infinitely often" readings), decides the residue condition
exactly on size descriptors, builds the canonical witness partition on
concrete windows, and refutes the quantifier-free matrix exhaustively on
non-conforming windows.

Two clauses are stated as inequalities rather than the tempting equations:
the shift image of b_{m-1} contains every a_0 point and lies under
b_0 v a_0, but it misses each interval's first point, so it does not equal
b_0 v a_0.  The inequality versions are satisfied by the witness and still
support the counting argument.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from ..core import (
    Budget,
    DEFAULT_BUDGET,
    Tri,
    WitnessPreconditionError,
)
from ..descriptors import EmptyTail, SequenceDescriptor
from . import formulas as F

VARIANTS = ("plain", "split", "infinitely_often")


# ---------------------------------------------------------------------------
# Formula emission.

def _alpha(t: F.Term, power: int = 1) -> F.Term:
    return F.Alpha(power, t)


def _fixed(v: str) -> F.Formula:
    return F.Eq(_alpha(F.Var(v)), F.Var(v))


def _cov_is_top(x: F.Term, u: str) -> F.Formula:
    # cov(x) = 1: every shift-fixed superset of x is 1
    return F.Forall(
        u,
        F.Implies(
            F.And((_fixed(u), F.Le(x, F.Var(u)))),
            F.Eq(F.Var(u), F.One()),
        ),
    )


def _small(x: F.Term, y: str, u: str) -> F.Formula:
    # every proper subset has a strictly smaller cover: some fixed set
    # contains the subset but not x
    return F.Forall(
        y,
        F.Implies(
            F.And((F.Le(F.Var(y), x), F.Not(F.Eq(F.Var(y), x)))),
            F.Exists(
                u,
                F.And(
                    (
                        _fixed(u),
                        F.Le(F.Var(y), F.Var(u)),
                        F.Not(F.Le(x, F.Var(u))),
                    )
                ),
            ),
        ),
    )


def _pairwise_disjoint(names: Sequence[str]) -> List[F.Formula]:
    out: List[F.Formula] = []
    for i in range(len(names)):
        for k in range(i + 1, len(names)):
            out.append(F.Eq(F.Meet(F.Var(names[i]), F.Var(names[k])), F.Zero()))
    return out


def _join_all(names: Sequence[str]) -> F.Term:
    term: F.Term = F.Var(names[0])
    for nm in names[1:]:
        term = F.Join(term, F.Var(nm))
    return term


def _matrix(m: int, j: int) -> F.Formula:
    """Quantifier-free-over-the-witnesses core of the sentence (it still
    contains the bounded quantifiers of cov and smallness)."""
    bs = [f"b{i}" for i in range(m)]
    as_ = [f"a{i}" for i in range(j)]
    names = bs + as_
    clauses: List[F.Formula] = []
    clauses.extend(_pairwise_disjoint(names))
    clauses.append(F.Eq(_join_all(names), F.One()))
    for nm in bs:
        clauses.append(_cov_is_top(F.Var(nm), "u"))
    for nm in as_:
        clauses.append(_cov_is_top(F.Var(nm), "u"))
        clauses.append(_small(F.Var(nm), "y", "u"))
    # cyclic shift clauses
    for i in range(m - 1):
        clauses.append(F.Eq(_alpha(F.Var(bs[i])), F.Var(bs[i + 1])))
    if j >= 1:
        for i in range(j - 1):
            clauses.append(F.Eq(_alpha(F.Var(as_[i])), F.Var(as_[i + 1])))
        clauses.append(F.Le(F.Var(as_[0]), _alpha(F.Var(bs[m - 1]))))
        clauses.append(
            F.Le(_alpha(F.Var(bs[m - 1])), F.Join(F.Var(bs[0]), F.Var(as_[0])))
        )
        clauses.append(F.Le(_alpha(F.Var(as_[j - 1])), F.Var(bs[0])))
    else:
        clauses.append(F.Eq(_alpha(F.Var(bs[m - 1])), F.Var(bs[0])))
    return F.And(tuple(clauses))


def _close_existentially(names: Sequence[str], body: F.Formula) -> F.Formula:
    for nm in reversed(names):
        body = F.Exists(nm, body)
    return body


def _plain(m: int, j: int) -> F.Formula:
    names = [f"b{i}" for i in range(m)] + [f"a{i}" for i in range(j)]
    return _close_existentially(names, _matrix(m, j))


def _relativize_term(t: F.Term, c: str) -> F.Term:
    if isinstance(t, F.Zero) or isinstance(t, F.Var):
        return t
    if isinstance(t, F.One):
        return F.Var(c)
    if isinstance(t, F.Meet):
        return F.Meet(_relativize_term(t.left, c), _relativize_term(t.right, c))
    if isinstance(t, F.Join):
        return F.Join(_relativize_term(t.left, c), _relativize_term(t.right, c))
    if isinstance(t, F.Comp):
        return F.Meet(F.Var(c), F.Comp(_relativize_term(t.arg, c)))
    if isinstance(t, F.Alpha):
        return F.Alpha(t.power, _relativize_term(t.arg, c))
    raise TypeError(f"not a term: {t!r}")


def relativize(f: F.Formula, c: str) -> F.Formula:
    """Interpret the formula in the relative algebra below the fixed set c."""
    if isinstance(f, F.Eq) or isinstance(f, F.Le):
        cls = type(f)
        return cls(_relativize_term(f.left, c), _relativize_term(f.right, c))
    if isinstance(f, F.Not):
        return F.Not(relativize(f.arg, c))
    if isinstance(f, F.And):
        return F.And(tuple(relativize(g, c) for g in f.args))
    if isinstance(f, F.Or):
        return F.Or(tuple(relativize(g, c) for g in f.args))
    if isinstance(f, F.Implies):
        return F.Implies(relativize(f.left, c), relativize(f.right, c))
    if isinstance(f, F.Exists):
        return F.Exists(
            f.var,
            F.And((F.Le(F.Var(f.var), F.Var(c)), relativize(f.body, c))),
        )
    if isinstance(f, F.Forall):
        return F.Forall(
            f.var,
            F.Implies(F.Le(F.Var(f.var), F.Var(c)), relativize(f.body, c)),
        )
    raise TypeError(f"not a formula: {f!r}")


def _proper_divisors(j: int) -> List[int]:
    return [i for i in range(1, j) if j % i == 0]


def exact_cycles(d: str, j: int) -> F.Formula:
    """The fixed set d is a disjoint union of cycles of length exactly j.

    Every subset below d is fixed by the j-th shift power, and every nonzero
    subset below d contains a nonzero piece moved by each proper-divisor
    power (a point on a shorter cycle would be fixed by its own length).
    """
    if j == 0:
        return F.Eq(F.Var(d), F.Zero())
    divides = F.Forall(
        "x",
        F.Implies(
            F.Le(F.Var("x"), F.Var(d)),
            F.Eq(_alpha(F.Var("x"), j), F.Var("x")),
        ),
    )
    if j == 1:
        return divides
    moved = [F.Not(F.Eq(_alpha(F.Var("z"), i), F.Var("z"))) for i in _proper_divisors(j)]
    no_short = F.Forall(
        "y",
        F.Implies(
            F.And((F.Le(F.Var("y"), F.Var(d)), F.Not(F.Eq(F.Var("y"), F.Zero())))),
            F.Exists(
                "z",
                F.And(
                    tuple(
                        [F.Le(F.Var("z"), F.Var("y")),
                         F.Not(F.Eq(F.Var("z"), F.Zero()))]
                        + moved
                    )
                ),
            ),
        ),
    )
    return F.And((divides, no_short))


def _split(m: int, j: int) -> F.Formula:
    """Eventual form without the length >= m hypothesis: split 1 into a
    fixed piece carrying the partition and a fixed remainder made of
    length-j cycles (a length < m congruent to j is exactly j)."""
    body = F.And(
        (
            _fixed("c"),
            _fixed("d"),
            F.Eq(F.Meet(F.Var("c"), F.Var("d")), F.Zero()),
            F.Eq(F.Join(F.Var("c"), F.Var("d")), F.One()),
            F.Or((F.Eq(F.Var("c"), F.Zero()), relativize(_plain(m, j), "c"))),
            exact_cycles("d", j),
        )
    )
    return F.Exists("c", F.Exists("d", body))


def _infinitely_often(m: int, j: int) -> F.Formula:
    """Some nonzero fixed piece is entirely conforming."""
    body = F.And(
        (
            _fixed("e"),
            F.Not(F.Eq(F.Var("e"), F.Zero())),
            F.Or((relativize(_plain(m, j), "e"), exact_cycles("e", j))),
        )
    )
    return F.Exists("e", body)


def obstruction_formula(m: int, j: int, variant: str = "plain") -> F.Formula:
    """Sentence detecting "every cycle length is j modulo m".

    Variants: "plain" assumes every length is at least m; "split" drops
    that hypothesis by carving out the length-exactly-j cycles; and
    "infinitely_often" asserts a nonzero conforming fixed piece.
    """
    if m < 1:
        raise ValueError("modulus m must be >= 1")
    if not 0 <= j < m:
        raise ValueError("residue j must satisfy 0 <= j < m")
    if variant == "plain":
        return _plain(m, j)
    if variant == "split":
        return _split(m, j)
    if variant == "infinitely_often":
        return _infinitely_often(m, j)
    raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")


# ---------------------------------------------------------------------------
# Exact residue decision on descriptors.

def _normalize_mode(mode: str) -> str:
    low = mode.replace("-", "_")
    if low in ("eventual", "ev"):
        return "eventual"
    if low in ("infinitely_often", "infinitelyOften", "io"):
        return "infinitely_often"
    raise ValueError(f"mode must be 'eventual' or 'infinitely_often', got {mode!r}")


def obstruction_truth(seq: SequenceDescriptor, m: int, j: int, mode: str) -> Tri:
    """Decide the residue condition directly on the size descriptor.

    Every supported tail has eventually periodic residues modulo m, so the
    answer is exact: the finite prefix and the residue preperiod never
    affect "all but finitely many" or "infinitely many".
    """
    if m < 1:
        raise ValueError("modulus m must be >= 1")
    mode = _normalize_mode(mode)
    target = j % m
    if isinstance(seq.tail, EmptyTail):
        if mode == "eventual":
            return Tri.yes(
                "finite size sequence: the condition holds for all but "
                "finitely many indices vacuously",
                modulus=m,
                target=target,
            )
        return Tri.no(
            "finite size sequence has no infinite subfamily",
            modulus=m,
            target=target,
        )
    pre, cycle = seq.tail_residues(m)
    detail = dict(modulus=m, target=target, preperiod=list(pre), cycle=list(cycle))
    if mode == "eventual":
        if all(r == target for r in cycle):
            return Tri.yes("residue cycle is constantly the target", **detail)
        return Tri.no(
            "residue cycle attains a non-target value infinitely often", **detail
        )
    if any(r == target for r in cycle):
        return Tri.yes("residue cycle attains the target infinitely often", **detail)
    return Tri.no("residue cycle never attains the target", **detail)


# ---------------------------------------------------------------------------
# Window-exact cover and smallness.

def interval_spans(lengths: Sequence[int]) -> List[Tuple[int, int]]:
    spans = []
    start = 0
    for k, n in enumerate(lengths):
        if n < 1:
            raise ValueError(f"interval {k} has nonpositive length {n}")
        spans.append((start, start + n))
        start += n
    return spans


def cov(x: Iterable[int], window: Sequence[int]) -> FrozenSet[int]:
    """Union of the window intervals touched by x (the least shift-fixed
    superset within the window)."""
    spans = interval_spans(window)
    total = spans[-1][1] if spans else 0
    pts = frozenset(x)
    for p in pts:
        if not 0 <= p < total:
            raise ValueError(f"point {p} outside window of size {total}")
    out: set = set()
    for lo, hi in spans:
        if any(lo <= p < hi for p in pts):
            out.update(range(lo, hi))
    return frozenset(out)


def small(x: Iterable[int], window: Sequence[int]) -> bool:
    """x meets every interval it touches in exactly one point."""
    spans = interval_spans(window)
    pts = frozenset(x)
    total = spans[-1][1] if spans else 0
    for p in pts:
        if not 0 <= p < total:
            raise ValueError(f"point {p} outside window of size {total}")
    for lo, hi in spans:
        if sum(1 for p in pts if lo <= p < hi) > 1:
            return False
    return True


def _shift(pts: FrozenSet[int], spans: Sequence[Tuple[int, int]]) -> FrozenSet[int]:
    out = set()
    for lo, hi in spans:
        n = hi - lo
        for p in pts:
            if lo <= p < hi:
                out.add(lo + (p - lo + 1) % n)
    return frozenset(out)


# ---------------------------------------------------------------------------
# Witness construction and verification.

@dataclass(frozen=True)
class WitnessReport:
    lengths: Tuple[int, ...]
    m: int
    j: int
    a_sets: Tuple[FrozenSet[int], ...]
    b_sets: Tuple[FrozenSet[int], ...]
    checks: Tuple[Tuple[str, bool], ...]

    @property
    def passed(self) -> bool:
        return all(ok for _, ok in self.checks)

    def to_json(self) -> dict:
        return {
            "schemaVersion": 1,
            "lengths": list(self.lengths),
            "m": self.m,
            "j": self.j,
            "aSets": [sorted(s) for s in self.a_sets],
            "bSets": [sorted(s) for s in self.b_sets],
            "checks": [{"name": nm, "ok": ok} for nm, ok in self.checks],
            "passed": self.passed,
        }


def _layout(lengths: Sequence[int], m: int, j: int):
    """Per interval [s, s+n): positions below n-j cycle through the b's by
    residue, the last j positions form the a-chain."""
    bs = [set() for _ in range(m)]
    as_ = [set() for _ in range(j)]
    for (lo, hi) in interval_spans(lengths):
        n = hi - lo
        for p in range(n - j):
            bs[p % m].add(lo + p)
        for ell in range(j):
            as_[ell].add(lo + n - j + ell)
    return [frozenset(s) for s in as_], [frozenset(s) for s in bs]


def _verify_cells(lengths: Sequence[int], m: int, j: int,
                  a_sets: Sequence[FrozenSet[int]],
                  b_sets: Sequence[FrozenSet[int]]) -> List[Tuple[str, bool]]:
    spans = interval_spans(lengths)
    total = spans[-1][1] if spans else 0
    window = frozenset(range(total))
    cells = list(b_sets) + list(a_sets)
    checks: List[Tuple[str, bool]] = []

    disjoint = all(
        not (cells[i] & cells[k])
        for i in range(len(cells))
        for k in range(i + 1, len(cells))
    )
    union = frozenset().union(*cells) if cells else frozenset()
    checks.append(("partition", disjoint and union == window))
    checks.append(("cov_b", all(cov(b, lengths) == window for b in b_sets)))
    checks.append(("cov_a", all(cov(a, lengths) == window for a in a_sets)))
    checks.append(("small_a", all(small(a, lengths) for a in a_sets)))
    checks.append(
        (
            "b_successors",
            all(
                _shift(b_sets[i], spans) == b_sets[i + 1]
                for i in range(m - 1)
            ),
        )
    )
    if j >= 1:
        checks.append(
            (
                "a_chain",
                all(
                    _shift(a_sets[i], spans) == a_sets[i + 1]
                    for i in range(j - 1)
                ),
            )
        )
        image = _shift(b_sets[m - 1], spans)
        checks.append(
            (
                "boundary_in",
                a_sets[0] <= image and image <= (b_sets[0] | a_sets[0]),
            )
        )
        checks.append(("boundary_wrap", _shift(a_sets[j - 1], spans) <= b_sets[0]))
    else:
        checks.append(("boundary_in", _shift(b_sets[m - 1], spans) == b_sets[0]))
    equal = True
    for lo, hi in spans:
        counts = {
            i: sum(1 for p in b_sets[i] if lo <= p < hi) for i in range(m)
        }
        want = (hi - lo - j) // m
        if any(c != want for c in counts.values()):
            equal = False
    checks.append(("equal_counts", equal))
    return checks


def witness_partition(lengths: Sequence[int], m: int, j: int) -> WitnessReport:
    """Canonical named witness sets, verified exhaustively on the window.

    Raises WitnessPreconditionError naming the first interval whose length
    is below m or not congruent to j.
    """
    if m < 1:
        raise ValueError("modulus m must be >= 1")
    if not 0 <= j < m:
        raise ValueError("residue j must satisfy 0 <= j < m")
    for k, n in enumerate(lengths):
        if n < m:
            raise WitnessPreconditionError(
                f"interval {k} has length {n} < m = {m}", k=k
            )
        if n % m != j:
            raise WitnessPreconditionError(
                f"interval {k} has length {n} != {j} (mod {m})", k=k
            )
    a_sets, b_sets = _layout(lengths, m, j)
    checks = _verify_cells(lengths, m, j, a_sets, b_sets)
    return WitnessReport(
        lengths=tuple(lengths),
        m=m,
        j=j,
        a_sets=tuple(a_sets),
        b_sets=tuple(b_sets),
        checks=tuple(checks),
    )


# ---------------------------------------------------------------------------
# Exhaustive matrix satisfiability on a window.

def _successor_choices(m: int, j: int) -> Dict[int, Tuple[int, ...]]:
    """Allowed (cell of p, cell of shift p) transitions.

    Cells 0..m-1 are the b's, m..m+j-1 the a's.  Derived from the cyclic
    clauses read as constraints on consecutive points of one cycle; these
    are necessary conditions, so pruning with them is sound.
    """
    A0 = m  # cell id of a_0
    out: Dict[int, Tuple[int, ...]] = {}
    for ell in range(m - 1):
        out[ell] = (ell + 1,)
    if j == 0:
        out[m - 1] = (0,)
    else:
        out[m - 1] = (0, A0)
        for ell in range(j - 1):
            out[m + ell] = (m + ell + 1,)
        out[m + j - 1] = (0,)
    return out


def _predecessor_required(m: int, j: int) -> Dict[int, Tuple[int, ...]]:
    """Allowed cells of the predecessor of a point in each cell (from the
    equational clauses read backwards)."""
    allowed: Dict[int, set] = {c: set() for c in range(m + j)}
    for c, nexts in _successor_choices(m, j).items():
        for nx in nexts:
            allowed[nx].add(c)
    return {c: tuple(sorted(s)) for c, s in allowed.items()}


def matrix_satisfiable(lengths: Sequence[int], m: int, j: int,
                       budget: Budget = DEFAULT_BUDGET) -> Tri:
    """Search all cell assignments of the window for one satisfying the
    quantifier-free matrix (window-exact cover and smallness).

    Backtracking over positions in order; consecutive-point transition
    rules and per-interval cell counting prune; any witness found is
    re-verified by the full check list before a Yes is returned.
    """
    if m < 1:
        raise ValueError("modulus m must be >= 1")
    if not 0 <= j < m:
        raise ValueError("residue j must satisfy 0 <= j < m")
    spans = interval_spans(lengths)
    n_cells = m + j
    succ = _successor_choices(m, j)
    pred = _predecessor_required(m, j)
    nodes = 0

    assignment: List[int] = []
    found: Optional[List[int]] = None

    def search_interval(ki: int) -> bool:
        nonlocal nodes, found
        if ki == len(spans):
            found = list(assignment)
            return True
        lo, hi = spans[ki]
        n = hi - lo
        counts = [0] * n_cells
        cells: List[int] = []

        def place(pos: int) -> bool:
            nonlocal nodes
            if pos == n:
                # cycle wrap: last point's successor is the first point
                if cells[0] not in succ[cells[-1]]:
                    return False
                # window-exact cover and smallness per interval
                if any(counts[c] < 1 for c in range(m)):
                    return False
                if any(counts[m + t] != 1 for t in range(j)):
                    return False
                return search_interval(ki + 1)
            for c in range(n_cells):
                nodes_local = nodes + 1
                if nodes_local > budget.max_nodes:
                    raise _NodeBudget()
                nodes = nodes_local
                if pos > 0 and c not in succ[cells[-1]]:
                    continue
                if pos > 0 and cells[-1] not in pred[c]:
                    continue
                if c >= m and counts[c] >= 1:
                    continue  # smallness: one a-point per interval
                cells.append(c)
                counts[c] += 1
                assignment.append(c)
                if place(pos + 1):
                    return True
                assignment.pop()
                counts[c] -= 1
                cells.pop()
            return False

        return place(0)

    class _NodeBudget(Exception):
        pass

    try:
        sat = search_interval(0)
    except _NodeBudget:
        return Tri.unknown(
            "search node budget exhausted", nodes=nodes, max_nodes=budget.max_nodes
        )
    if not sat or found is None:
        return Tri.no(
            "no assignment satisfies the quantifier-free matrix on this window",
            nodes=nodes,
        )
    b_sets = [frozenset(p for p, c in enumerate(found) if c == i) for i in range(m)]
    a_sets = [
        frozenset(p for p, c in enumerate(found) if c == m + t) for t in range(j)
    ]
    checks = _verify_cells(lengths, m, j, a_sets, b_sets)
    if not all(ok for _, ok in checks):
        raise AssertionError(
            "search produced an assignment failing full verification; "
            "pruning rules are inconsistent with the matrix"
        )
    return Tri.yes(
        "assignment satisfies the quantifier-free matrix",
        nodes=nodes,
        bSets=[sorted(s) for s in b_sets],
        aSets=[sorted(s) for s in a_sets],
    )
