"""Hitting digraphs, window representability, and rotary embeddings.

A partition of a window into named classes induces a digraph: an edge from
class A to class B records that the map sends some point of A into B.
Which digraphs arise this way from partitions into "infinite-like" classes
controls the existential theory of the induced structure, so representable
digraphs are compared between windows as existential-theory evidence.

Window searches can certify presence (a found partition re-verifies) and
cardinality-type absence, but never absence from exhaustion alone: a bigger
window might represent the digraph, so exhaustion yields Unknown.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import permutations
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from .core import Budget, DEFAULT_BUDGET, Tri
from .aperm import WindowMap, rotary_window
from .descriptors import SequenceDescriptor


@dataclass(frozen=True)
class Digraph:
    """Loops allowed; vertices are 0..vertices-1."""

    vertices: int
    edges: FrozenSet[Tuple[int, int]]

    def __post_init__(self):
        if self.vertices < 0:
            raise ValueError("vertex count must be >= 0")
        for (u, v) in self.edges:
            if not (0 <= u < self.vertices and 0 <= v < self.vertices):
                raise ValueError(f"edge ({u}, {v}) has an endpoint outside 0..{self.vertices - 1}")

    @staticmethod
    def make(vertices: int, edges: Iterable[Tuple[int, int]]) -> "Digraph":
        return Digraph(vertices, frozenset((int(u), int(v)) for u, v in edges))

    def to_json(self) -> dict:
        return {"vertices": self.vertices, "edges": sorted([u, v] for u, v in self.edges)}

    @staticmethod
    def from_json(data: dict) -> "Digraph":
        return Digraph.make(data["vertices"], [tuple(e) for e in data["edges"]])


def canonical_form(g: Digraph) -> Tuple[int, Tuple[Tuple[int, int], ...]]:
    """Lexicographically least relabeling of the edge set.

    Brute force over vertex orderings; intended for the <= 6 vertex graphs
    used here.
    """
    if g.vertices > 8:
        raise ValueError("canonical_form supports at most 8 vertices")
    best: Optional[Tuple[Tuple[int, int], ...]] = None
    for perm in permutations(range(g.vertices)):
        relabeled = tuple(sorted((perm[u], perm[v]) for u, v in g.edges))
        if best is None or relabeled < best:
            best = relabeled
    return (g.vertices, best if best is not None else ())


def isomorphic(a: Digraph, b: Digraph) -> bool:
    return a.vertices == b.vertices and canonical_form(a) == canonical_form(b)


def enumerate_digraphs(size_bound: int) -> List[Digraph]:
    """All digraphs with 1..size_bound vertices, one per isomorphism class."""
    out: List[Digraph] = []
    for n in range(1, size_bound + 1):
        seen: Dict[tuple, Digraph] = {}
        pairs = [(u, v) for u in range(n) for v in range(n)]
        for mask in range(1 << (n * n)):
            edges = frozenset(pairs[i] for i in range(n * n) if (mask >> i) & 1)
            g = Digraph(n, edges)
            key = canonical_form(g)
            if key not in seen:
                seen[key] = g
        out.extend(seen[k] for k in sorted(seen))
    return out


def hitting_digraph(parts: Sequence[Iterable[int]], f: WindowMap) -> Digraph:
    """Digraph on the partition classes: edge (A, B) iff f[A] meets B."""
    cells = [frozenset(p) for p in parts]
    union: set = set()
    total = 0
    for c in cells:
        total += len(c)
        union |= c
    if len(union) != total or union != set(range(f.n)):
        raise ValueError("parts do not partition the window")
    owner = {}
    for i, c in enumerate(cells):
        for p in c:
            owner[p] = i
    edges = set()
    for i, c in enumerate(cells):
        for p in c:
            q = f.apply(p)
            if q is not None:
                edges.add((i, owner[q]))
    return Digraph(len(cells), frozenset(edges))


def _spans(lengths: Sequence[int]) -> List[Tuple[int, int]]:
    spans = []
    start = 0
    for n in lengths:
        if n < 1:
            raise ValueError("interval lengths must be >= 1")
        spans.append((start, start + n))
        start += n
    return spans


def _cyclic_successors(lengths: Sequence[int]) -> List[int]:
    succ = []
    for lo, hi in _spans(lengths):
        for p in range(lo, hi):
            succ.append(lo + (p - lo + 1) % (hi - lo))
    return succ


def digraph_represented(g: Digraph, window: Sequence[int],
                        budget: Budget = DEFAULT_BUDGET,
                        min_intervals: int = 2) -> Tri:
    """Search the window for a partition whose hitting digraph equals g.

    Classes must be nonempty and meet at least min(min_intervals, number of
    intervals) distinct intervals: the window surrogate for "nonzero mod
    finite".  Yes re-verifies the witness; No needs a cardinality
    certificate; exhaustion is Unknown because a larger window could still
    represent the digraph.
    """
    lengths = list(window)
    spans = _spans(lengths)
    total = spans[-1][1]
    if g.vertices > total:
        return Tri.no(
            "cardinality certificate: more vertices than window points",
            vertices=g.vertices,
            points=total,
        )
    if g.vertices == 0:
        return Tri.no("cardinality certificate: a partition has at least one class",
                      vertices=0, points=total)
    succ = _cyclic_successors(lengths)
    interval_of = []
    for idx, (lo, hi) in enumerate(spans):
        interval_of.extend([idx] * (hi - lo))
    surrogate = min(min_intervals, len(lengths))
    v = g.vertices
    edges = g.edges
    assign = [-1] * total
    counts = [0] * v
    touched: List[set] = [set() for _ in range(v)]
    nodes = 0

    class _Exhausted(Exception):
        pass

    def ok_pair(a: int, b: int) -> bool:
        return (a, b) in edges

    def place(p: int) -> bool:
        nonlocal nodes
        if p == total:
            return _final_check()
        remaining = total - p
        if remaining < sum(1 for c in range(v) if counts[c] == 0):
            return False
        for c in range(v):
            nodes += 1
            if nodes > budget.max_nodes:
                raise _Exhausted()
            # successor constraints with already-assigned neighbours
            q = succ[p]
            if q < p and not ok_pair(c, assign[q]):
                continue
            if q == p and not ok_pair(c, c):
                continue
            lo, hi = spans[interval_of[p]]
            prev = lo + (p - lo - 1) % (hi - lo)
            if prev < p and not ok_pair(assign[prev], c):
                continue
            assign[p] = c
            counts[c] += 1
            added = interval_of[p] not in touched[c]
            if added:
                touched[c].add(interval_of[p])
            if place(p + 1):
                return True
            if added:
                touched[c].discard(interval_of[p])
            counts[c] -= 1
            assign[p] = -1
        return False

    def _final_check() -> bool:
        if any(counts[c] == 0 for c in range(v)):
            return False
        if any(len(touched[c]) < surrogate for c in range(v)):
            return False
        hit = set()
        for p in range(total):
            hit.add((assign[p], assign[succ[p]]))
        return hit == edges

    try:
        found = place(0)
    except _Exhausted:
        return Tri.unknown(
            "search node budget exhausted at this window",
            nodes=nodes,
            max_nodes=budget.max_nodes,
        )
    if not found:
        return Tri.unknown(
            "no witness partition in this window; window exhaustion cannot "
            "refute representability in the infinite structure",
            nodes=nodes,
            surrogate=surrogate,
        )
    parts = [sorted(p for p in range(total) if assign[p] == c) for c in range(v)]
    check = hitting_digraph(parts, rotary_window(lengths))
    if check.edges != edges:
        raise AssertionError("witness failed re-verification; search pruning is unsound")
    return Tri.yes(
        "witness partition found and re-verified",
        parts=parts,
        surrogate=surrogate,
        nodes=nodes,
    )


@dataclass(frozen=True)
class CompareReport:
    size_bound: int
    window_a: Tuple[int, ...]
    window_b: Tuple[int, ...]
    rows: Tuple[Tuple[dict, str, str], ...]  # (digraph json, verdict in a, verdict in b)
    separating_a_not_b: Tuple[dict, ...]
    separating_b_not_a: Tuple[dict, ...]

    def to_json(self) -> dict:
        return {
            "schemaVersion": 1,
            "note": "window-scale evidence, not a verdict about the infinite structures",
            "sizeBound": self.size_bound,
            "windowA": list(self.window_a),
            "windowB": list(self.window_b),
            "rows": [
                {"digraph": d, "inA": va, "inB": vb} for d, va, vb in self.rows
            ],
            "separatingANotB": list(self.separating_a_not_b),
            "separatingBNotA": list(self.separating_b_not_a),
        }


def exists_theory_compare(a: Sequence[int], b: Sequence[int], size_bound: int = 3,
                          budget: Budget = DEFAULT_BUDGET,
                          min_intervals: int = 2) -> CompareReport:
    """Representability comparison over all digraphs up to the size bound."""
    rows = []
    sep_ab = []
    sep_ba = []
    for g in enumerate_digraphs(size_bound):
        va = digraph_represented(g, a, budget, min_intervals)
        vb = digraph_represented(g, b, budget, min_intervals)
        rows.append((g.to_json(), va.verdict, vb.verdict))
        if va.is_yes and not vb.is_yes:
            sep_ab.append(g.to_json())
        elif vb.is_yes and not va.is_yes:
            sep_ba.append(g.to_json())
    return CompareReport(
        size_bound=size_bound,
        window_a=tuple(a),
        window_b=tuple(b),
        rows=tuple(rows),
        separating_a_not_b=tuple(sep_ab),
        separating_b_not_a=tuple(sep_ba),
    )


# ---------------------------------------------------------------------------
# Rotary embedding.

FSpec = Union[str, Callable[[int], int]]


def _parse_f(f: FSpec) -> Callable[[int], int]:
    if callable(f):
        return f
    if f == "id":
        return lambda j: j
    if isinstance(f, str) and f.startswith("shift:"):
        k = int(f.split(":", 1)[1])
        return lambda j: j - k
    raise ValueError(f"unsupported index map spec {f!r}; use 'id', 'shift:k' or a callable")


@dataclass(frozen=True)
class EmbeddingMap:
    """Wraps each target interval around its source interval.

    e maps target points onto source points (undefined on excluded target
    intervals, marked -1); the preimage operator eta embeds source subsets
    into target subsets.
    """

    source_lengths: Tuple[int, ...]
    target_lengths: Tuple[int, ...]
    f_map: Tuple[Optional[int], ...]  # target interval -> source interval
    e: Tuple[int, ...]  # target point -> source point, -1 when excluded
    excluded_targets: Tuple[int, ...]
    unhit_sources: Tuple[int, ...]

    @property
    def wrap_counts(self) -> Tuple[Optional[int], ...]:
        out = []
        for j, src in enumerate(self.f_map):
            if src is None:
                out.append(None)
            else:
                out.append(self.target_lengths[j] // self.source_lengths[src])
        return tuple(out)

    def eta(self, source_subset: Iterable[int]) -> FrozenSet[int]:
        s = set(source_subset)
        return frozenset(t for t, sp in enumerate(self.e) if sp >= 0 and sp in s)

    def to_json(self) -> dict:
        return {
            "sourceLengths": list(self.source_lengths),
            "targetLengths": list(self.target_lengths),
            "fMap": [s if s is not None else None for s in self.f_map],
            "excludedTargets": list(self.excluded_targets),
            "unhitSources": list(self.unhit_sources),
            "wrapCounts": [c if c is not None else None for c in self.wrap_counts],
        }


@dataclass(frozen=True)
class EmbeddingReport:
    checks: Tuple[Tuple[str, bool], ...]
    intertwine_violations: Tuple[int, ...]
    sampled_subsets: int

    @property
    def passed(self) -> bool:
        return all(ok for _, ok in self.checks)

    def to_json(self) -> dict:
        return {
            "schemaVersion": 1,
            "checks": [{"name": nm, "ok": ok} for nm, ok in self.checks],
            "intertwineViolations": list(self.intertwine_violations),
            "sampledSubsets": self.sampled_subsets,
            "passed": self.passed,
        }


def build_embedding(m_seq: Union[SequenceDescriptor, Sequence[int]],
                    n_seq: Union[SequenceDescriptor, Sequence[int]],
                    f: FSpec = "id",
                    window: int = 6,
                    samples: int = 64,
                    seed: int = 0) -> Tuple[EmbeddingMap, EmbeddingReport]:
    """Concrete embedding of the source system into the target system.

    For each target interval j with source f(j), requires the source length
    to divide the target length, wraps the target interval around the source
    interval, and verifies on the window: eta preserves meet and complement,
    is injective on subsets of hit sources, and intertwines the two shift
    maps pointwise outside the excluded boundary intervals.
    """
    fn = _parse_f(f)
    tgt = [_value_at(n_seq, j) for j in range(window)]
    f_map: List[Optional[int]] = []
    for j in range(window):
        src = fn(j)
        f_map.append(src if 0 <= src else None)
    max_src = max((s for s in f_map if s is not None), default=-1)
    srcs = [_value_at(m_seq, i) for i in range(max_src + 1)]
    for j, src in enumerate(f_map):
        if src is None:
            continue
        if tgt[j] % srcs[src] != 0:
            raise ValueError(
                f"divisibility failure at target {j}: source length {srcs[src]} "
                f"does not divide target length {tgt[j]}"
            )
    src_spans = _spans(srcs) if srcs else []
    tgt_spans = _spans(tgt)
    e: List[int] = []
    for j, (lo, hi) in enumerate(tgt_spans):
        src = f_map[j]
        if src is None:
            e.extend([-1] * (hi - lo))
            continue
        slo, _ = src_spans[src]
        mlen = srcs[src]
        for t in range(hi - lo):
            e.append(slo + t % mlen)
    hit = sorted({s for s in f_map if s is not None})
    unhit = tuple(i for i in range(len(srcs)) if i not in hit)
    excluded = tuple(j for j, s in enumerate(f_map) if s is None)
    emb = EmbeddingMap(
        source_lengths=tuple(srcs),
        target_lengths=tuple(tgt),
        f_map=tuple(f_map),
        e=tuple(e),
        excluded_targets=excluded,
        unhit_sources=unhit,
    )
    report = _verify_embedding(emb, samples=samples, seed=seed)
    return emb, report


def _value_at(seq, i: int) -> int:
    if isinstance(seq, SequenceDescriptor):
        return seq.value(i)
    return int(seq[i])


def _verify_embedding(emb: EmbeddingMap, samples: int, seed: int) -> EmbeddingReport:
    src_spans = _spans(emb.source_lengths) if emb.source_lengths else []
    tgt_spans = _spans(emb.target_lengths)
    n_src = src_spans[-1][1] if src_spans else 0
    n_tgt = tgt_spans[-1][1]
    src_succ = _cyclic_successors(emb.source_lengths) if emb.source_lengths else []
    tgt_succ = _cyclic_successors(emb.target_lengths)
    included = [t for t in range(n_tgt) if emb.e[t] >= 0]
    hit_points = sorted({emb.e[t] for t in included})
    rng = random.Random(seed)

    # pointwise intertwining on included intervals
    violations = [t for t in included if emb.e[tgt_succ[t]] != src_succ[emb.e[t]]]

    want_hit = set()
    for i, span in enumerate(src_spans):
        if i not in emb.unhit_sources:
            want_hit.update(range(*span))
    checks: List[Tuple[str, bool]] = []
    checks.append(("surjective_onto_hit_sources", set(hit_points) == want_hit))
    meet_ok = True
    comp_ok = True
    inj_ok = True
    hit_set = set(hit_points)
    included_set = set(included)
    n_samp = 0
    for _ in range(samples):
        a = {p for p in range(n_src) if rng.random() < 0.5}
        b = {p for p in range(n_src) if rng.random() < 0.5}
        n_samp += 1
        if emb.eta(a & b) != (emb.eta(a) & emb.eta(b)):
            meet_ok = False
        if emb.eta(set(range(n_src)) - a) != (included_set - emb.eta(a)):
            comp_ok = False
        ah, bh = a & hit_set, b & hit_set
        if ah != bh and emb.eta(ah) == emb.eta(bh):
            inj_ok = False
    checks.append(("eta_meet", meet_ok))
    checks.append(("eta_comp_on_included", comp_ok))
    checks.append(("eta_injective_on_hit_sources", inj_ok))
    checks.append(("intertwine_outside_excluded", not violations))
    return EmbeddingReport(
        checks=tuple(checks),
        intertwine_violations=tuple(violations),
        sampled_subsets=n_samp,
    )
