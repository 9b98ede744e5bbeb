"""Coarse geometry of windows built from cyclic and path orbits.

A window concatenates finite orbits.  Inside an orbit the distance is the
path metric of its cycle or path graph.  Across orbits, with components
enumerated in a fixed ascending-length order, the distance between points
of J_m and J_n (m < n) is

    max(n, max_{k <= n} diam(J_k)).

Taking the prefix maximum up to and including the larger component keeps
the triangle inequality unconditionally; with the strict prefix (k < n) a
fast-growing window breaks it: for cycle lengths (4, 16) the antipodal
pair of the 16-cycle is at path distance 8 but a two-hop route through the
4-cycle would cost 2 + 2.  Both readings agree whenever component
diameters grow at most geometrically with ratio 2, and the ball-growth
bound max(2m+1, |union_{k<=m} J_k|) survives unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .core import Tri
from .descriptors import (
    AffineTail,
    ConstantTail,
    EmptyTail,
    FactorialTail,
    GeometricTail,
    ResidueTail,
    SequenceDescriptor,
)
from .aperm import OrbitSpectrum

Component = Tuple[str, int]  # ("cycle" | "path", length)


def _diam(comp: Component) -> int:
    kind, length = comp
    return length // 2 if kind == "cycle" else length - 1


def _normalize_components(source, n: Optional[int]) -> List[Component]:
    if isinstance(source, OrbitSpectrum):
        if source.n_like or source.rev_n_like or source.z_like:
            raise ValueError("metric windows need all-finite orbit kinds")
        comps: List[Component] = []
        mass = 0
        limit = n if n is not None else None
        if limit is None and not source.cycles.is_finite:
            raise ValueError("window size N required for an infinite cycle descriptor")
        k = 0
        while True:
            if source.cycles.is_finite and k >= len(source.cycles.prefix):
                break
            length = source.cycles.value(k)
            if limit is not None and mass + length > limit:
                break
            comps.append(("cycle", length))
            mass += length
            k += 1
            if limit is not None and mass == limit and source.finite_paths == ():
                break
        comps.extend(("path", p) for p in source.finite_paths)
    else:
        comps = []
        for entry in source:
            if isinstance(entry, (tuple, list)):
                kind, length = entry
                if kind not in ("cycle", "path"):
                    raise ValueError(f"unknown orbit kind {kind!r}")
                comps.append((kind, int(length)))
            else:
                comps.append(("cycle", int(entry)))
    if any(length < 1 for _, length in comps):
        raise ValueError("orbit lengths must be >= 1")
    mass = sum(length for _, length in comps)
    if n is not None and mass != n:
        raise ValueError(
            f"window size {n} does not match enumerated orbit mass {mass}"
        )
    return comps


@dataclass(frozen=True)
class MetricWindow:
    """Distance matrix in the canonical (ascending length) component order.

    ``to_canonical`` sends each point of the input layout (components
    concatenated as given) to its position in the canonical layout.
    """

    components: Tuple[Component, ...]
    input_order: Tuple[int, ...]
    spans: Tuple[Tuple[int, int], ...]
    to_canonical: Tuple[int, ...]
    dist: np.ndarray

    @property
    def n(self) -> int:
        return len(self.to_canonical)

    def dist_input_order(self) -> np.ndarray:
        p = np.asarray(self.to_canonical)
        return self.dist[np.ix_(p, p)]

    def check_triangle(self) -> bool:
        d = self.dist
        for k in range(d.shape[0]):
            if not (d <= d[:, k : k + 1] + d[k : k + 1, :]).all():
                return False
        return True


def metric_window(source, n: Optional[int] = None, check: bool = False) -> MetricWindow:
    """Builds the distance matrix for a window of finite orbits.

    ``source`` is an OrbitSpectrum, a list of cycle lengths, or a list of
    ("cycle" | "path", length) pairs.
    """
    given = _normalize_components(source, n)
    order = sorted(range(len(given)), key=lambda i: (given[i][1], i))
    comps = tuple(given[i] for i in order)
    spans: List[Tuple[int, int]] = []
    pos = 0
    for _, length in comps:
        spans.append((pos, pos + length))
        pos += length
    total = pos
    # input layout -> canonical layout, preserving within-orbit offsets
    canon_span_of_input = {order[k]: spans[k] for k in range(len(comps))}
    to_canon: List[int] = []
    for i, (_, length) in enumerate(given):
        lo, _ = canon_span_of_input[i]
        to_canon.extend(range(lo, lo + length))
    dist = np.zeros((total, total), dtype=np.int64)
    for k, (kind, length) in enumerate(comps):
        lo, hi = spans[k]
        idx = np.arange(length)
        diff = np.abs(idx[:, None] - idx[None, :])
        block = np.minimum(diff, length - diff) if kind == "cycle" else diff
        dist[lo:hi, lo:hi] = block
    prefix_diam = 0
    cross: List[int] = []
    for k, comp in enumerate(comps):
        prefix_diam = max(prefix_diam, _diam(comp))
        cross.append(max(k, prefix_diam))
    for a in range(len(comps)):
        for b in range(a + 1, len(comps)):
            alo, ahi = spans[a]
            blo, bhi = spans[b]
            dist[alo:ahi, blo:bhi] = cross[b]
            dist[blo:bhi, alo:ahi] = cross[b]
    w = MetricWindow(
        components=comps,
        input_order=tuple(order),
        spans=tuple(spans),
        to_canonical=tuple(to_canon),
        dist=dist,
    )
    if check and not w.check_triangle():
        raise AssertionError("triangle inequality failed; metric construction is wrong")
    return w


def ball_growth(w: MetricWindow, radii: Iterable[int]) -> List[dict]:
    """Max ball sizes per radius, with the uniform local finiteness bound.

    The bound max(2m+1, mass of the first m+1 components) is asserted.
    """
    masses = []
    acc = 0
    for _, length in w.components:
        acc += length
        masses.append(acc)
    out = []
    for m in radii:
        if m < 0:
            raise ValueError("radius must be >= 0")
        sizes = (w.dist <= m).sum(axis=0)
        biggest = int(sizes.max())
        prefix_mass = masses[min(m, len(masses) - 1)]
        bound = max(2 * m + 1, prefix_mass)
        if biggest > bound:
            raise AssertionError(
                f"ball bound violated at radius {m}: {biggest} > {bound}"
            )
        out.append({"radius": m, "maxBall": biggest, "bound": bound})
    return out


# ---------------------------------------------------------------------------
# Coarse equivalence of rotary windows.


def _frac_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _normal_tail(t):
    if isinstance(t, AffineTail) and t.slope == 0:
        return ConstantTail(t.intercept)
    return t


def _ratio_bound(q: Fraction) -> Fraction:
    return max(q, 1 / q)


def _verify_witness(m_seq: SequenceDescriptor, n_seq: SequenceDescriptor,
                    shift: int, k_const: Fraction, count: int = 32) -> int:
    """Index-by-index check of (1/K) n_{i+shift} <= m_i <= K n_{i+shift}."""
    start = max(len(m_seq.prefix), len(n_seq.prefix) - shift, 0, -shift)
    for i in range(start, start + count):
        m = Fraction(m_seq.value(i))
        n = Fraction(n_seq.value(i + shift))
        if not (n / k_const <= m <= k_const * n):
            raise AssertionError(
                f"witness failed at index {i}: m={m}, n={n}, K={k_const}"
            )
    return count


def coarse_equivalent_rotary(m_seq: SequenceDescriptor,
                             n_seq: SequenceDescriptor) -> Tri:
    """Coarse equivalence of the spaces generated by two cycle-length tails.

    Yes comes with a bounded-ratio matching witness (K, index shift),
    re-verified index-by-index on a window.  No comes with a divergence
    certificate.  Residue-class tails determine sizes only up to
    congruence, so they compare Unknown unless the descriptors are equal.
    """
    if not isinstance(m_seq, SequenceDescriptor) or not isinstance(n_seq, SequenceDescriptor):
        raise TypeError("coarse_equivalent_rotary expects SequenceDescriptor inputs")
    if m_seq == n_seq:
        return Tri.yes("identical descriptors", K="1", KFloat=1.0,
                       gamma={"shift": 0})
    ta, tb = _normal_tail(m_seq.tail), _normal_tail(n_seq.tail)
    if isinstance(ta, EmptyTail) and isinstance(tb, EmptyTail):
        return Tri.yes("both spaces bounded; coarsely a point", K="1",
                       KFloat=1.0, gamma={"shift": 0}, note="finite windows")
    if isinstance(ta, EmptyTail) or isinstance(tb, EmptyTail):
        return Tri.no("bounded space versus unbounded space")
    if isinstance(ta, ResidueTail) or isinstance(tb, ResidueTail):
        return Tri.unknown(
            "residue-class tail constrains sizes only up to congruence"
        )

    growth = {ConstantTail: 0, AffineTail: 1, GeometricTail: 2, FactorialTail: 3}
    ga, gb = growth[type(ta)], growth[type(tb)]
    if ga != gb:
        names = {0: "bounded", 1: "polynomial", 2: "exponential", 3: "superexponential"}
        return Tri.no(
            "growth class divergence: every almost-matching has unbounded "
            "length ratio",
            classes=[names[ga], names[gb]],
        )

    if isinstance(ta, ConstantTail):
        k_const = _ratio_bound(Fraction(ta.value_, tb.value_))
        shift = 0
    elif isinstance(ta, AffineTail):
        k_const = max(
            _ratio_bound(Fraction(ta.intercept, tb.intercept)),
            _ratio_bound(Fraction(ta.slope, tb.slope)),
        )
        shift = len(n_seq.prefix) - len(m_seq.prefix)
    elif isinstance(ta, GeometricTail):
        if ta.ratio != tb.ratio:
            return Tri.no(
                "index density mismatch: value counts below X grow like "
                "log X with different bases",
                ratios=[ta.ratio, tb.ratio],
            )
        # match tail indices directly; the ratio is then constant
        k_const = _ratio_bound(Fraction(ta.coefficient, tb.coefficient))
        shift = len(n_seq.prefix) - len(m_seq.prefix)
    else:
        k_const = Fraction(1)
        shift = (ta.offset - tb.offset) + len(n_seq.prefix) - len(m_seq.prefix)

    verified = _verify_witness(m_seq, n_seq, shift, k_const)
    return Tri.yes(
        "bounded-ratio matching on tail generators",
        K=_frac_str(k_const),
        KFloat=float(k_const),
        gamma={"shift": shift},
        verifiedIndices=verified,
    )


def window_matching(m_lengths: Sequence[int], n_lengths: Sequence[int]
                    ) -> Tuple[Fraction, List[Tuple[int, int]]]:
    """Least K admitting a perfect ratio-K matching of two finite windows.

    Bipartite matching (Kuhn's algorithm) with edges where the length
    ratio is within [1/K, K]; binary search over the candidate ratios.
    """
    if len(m_lengths) != len(n_lengths):
        raise ValueError("windows must have the same number of intervals")
    pairs_ratio = [
        [_ratio_bound(Fraction(m, n)) for n in n_lengths] for m in m_lengths
    ]
    candidates = sorted({q for row in pairs_ratio for q in row})

    def match_under(k_const: Fraction) -> Optional[List[int]]:
        size = len(m_lengths)
        match_to = [-1] * size  # n index -> m index

        def try_kuhn(i: int, seen: List[bool]) -> bool:
            for j in range(size):
                if pairs_ratio[i][j] <= k_const and not seen[j]:
                    seen[j] = True
                    if match_to[j] < 0 or try_kuhn(match_to[j], seen):
                        match_to[j] = i
                        return True
            return False

        for i in range(size):
            if not try_kuhn(i, [False] * size):
                return None
        return match_to

    lo, hi = 0, len(candidates) - 1
    best = None
    while lo <= hi:
        mid = (lo + hi) // 2
        got = match_under(candidates[mid])
        if got is not None:
            best = (candidates[mid], got)
            hi = mid - 1
        else:
            lo = mid + 1
    if best is None:
        raise AssertionError("complete candidate set always admits a matching")
    k_const, match_to = best
    return k_const, sorted((match_to[j], j) for j in range(len(match_to)))


# ---------------------------------------------------------------------------
# Explicit coarse maps between matched rotary windows.


@dataclass(frozen=True)
class CoarseMapsReport:
    pairs: Tuple[Tuple[int, int], ...]
    m_lengths: Tuple[int, ...]
    n_lengths: Tuple[int, ...]
    k_const: Fraction
    f: np.ndarray  # m-layout point -> n-layout point
    g: np.ndarray  # n-layout point -> m-layout point
    checks: Tuple[Tuple[str, bool], ...]
    observed: Dict[str, float]

    @property
    def passed(self) -> bool:
        return all(ok for _, ok in self.checks)

    def to_json(self) -> dict:
        out = {
            "schemaVersion": 1,
            "pairs": [list(p) for p in self.pairs],
            "mLengths": list(self.m_lengths),
            "nLengths": list(self.n_lengths),
            "K": _frac_str(self.k_const),
            "checks": [{"name": nm, "ok": ok} for nm, ok in self.checks],
            "observed": dict(self.observed),
            "passed": self.passed,
        }
        if len(self.f) <= 512 and len(self.g) <= 512:
            out["f"] = [int(v) for v in self.f]
            out["g"] = [int(v) for v in self.g]
        return out


def _lengths_at(source, indices: Iterable[int]) -> List[int]:
    out = []
    for i in indices:
        if isinstance(source, SequenceDescriptor):
            out.append(source.value(i))
        else:
            out.append(int(source[i]))
    return out


def build_coarse_maps(m_source, n_source, gamma: Union[int, Sequence[int]] = 0,
                      k_const: Optional[Union[int, Fraction]] = None,
                      window: int = 6) -> CoarseMapsReport:
    """The interval collapse/section maps for a matched pair of windows.

    For each matched pair the longer interval is split into balanced parts,
    one per point of the shorter interval; the collapse map sends a part to
    its point, the section picks each part's start.  Verifies on the
    window: collapse-after-section is the identity, section-after-collapse
    moves points at most K, collapse is 1-Lipschitz and the section
    stretches adjacent points at most ceil(K).
    """
    avail_m = None if isinstance(m_source, SequenceDescriptor) else len(m_source)
    avail_n = None if isinstance(n_source, SequenceDescriptor) else len(n_source)
    if isinstance(gamma, int):
        # finite length lists bound the usable part of the window
        pairs = [
            (i, i + gamma)
            for i in range(window)
            if i + gamma >= 0
            and (avail_m is None or i < avail_m)
            and (avail_n is None or i + gamma < avail_n)
        ]
    else:
        pairs = [(i, int(g)) for i, g in enumerate(gamma)]
        if len({j for _, j in pairs}) != len(pairs):
            raise ValueError("gamma must be injective on the window")
        for i, j in pairs:
            if (avail_m is not None and i >= avail_m) or (
                avail_n is not None and j >= avail_n
            ):
                raise ValueError(f"gamma pair ({i}, {j}) outside the given lengths")
    if not pairs:
        raise ValueError("empty matching on the window")
    m_lengths = _lengths_at(m_source, [i for i, _ in pairs])
    n_lengths = _lengths_at(n_source, [j for _, j in pairs])
    ratios = [
        _ratio_bound(Fraction(m, n)) for m, n in zip(m_lengths, n_lengths)
    ]
    if k_const is None:
        k_const = max(ratios)
    k_const = Fraction(k_const)
    for t, q in enumerate(ratios):
        if q > k_const:
            raise ValueError(
                f"invalid witness at pair {t}: ratio {_frac_str(q)} exceeds "
                f"K = {_frac_str(k_const)}"
            )

    m_total = sum(m_lengths)
    n_total = sum(n_lengths)
    f = np.zeros(m_total, dtype=np.int64)
    g = np.zeros(n_total, dtype=np.int64)
    m_lo = n_lo = 0
    section_identity = True
    max_disp_m = 0
    max_disp_n = 0
    collapse_stretch = 0
    section_stretch = 0

    def cyc(a: int, b: int, length: int) -> int:
        d = abs(a - b)
        return min(d, length - d)

    for (m_len, n_len) in zip(m_lengths, n_lengths):
        if m_len >= n_len:
            # f collapses parts of the m-interval, g is the section
            starts = [t * m_len // n_len for t in range(n_len)] + [m_len]
            for t in range(n_len):
                for u in range(starts[t], starts[t + 1]):
                    f[m_lo + u] = n_lo + t
                g[n_lo + t] = m_lo + starts[t]
            for t in range(n_len):
                if f[g[n_lo + t]] != n_lo + t:
                    section_identity = False
            for u in range(m_len):
                t = int(f[m_lo + u]) - n_lo
                max_disp_m = max(max_disp_m, cyc(u, starts[t], m_len))
            for u in range(m_len):
                v = (u + 1) % m_len
                collapse_stretch = max(
                    collapse_stretch,
                    cyc(int(f[m_lo + u]) - n_lo, int(f[m_lo + v]) - n_lo, n_len),
                )
            for t in range(n_len):
                s = (t + 1) % n_len
                section_stretch = max(
                    section_stretch, cyc(starts[t], starts[s], m_len)
                )
        else:
            starts = [t * n_len // m_len for t in range(m_len)] + [n_len]
            for t in range(m_len):
                for u in range(starts[t], starts[t + 1]):
                    g[n_lo + u] = m_lo + t
                f[m_lo + t] = n_lo + starts[t]
            for t in range(m_len):
                if g[f[m_lo + t]] != m_lo + t:
                    section_identity = False
            for u in range(n_len):
                t = int(g[n_lo + u]) - m_lo
                max_disp_n = max(max_disp_n, cyc(u, starts[t], n_len))
            for u in range(n_len):
                v = (u + 1) % n_len
                collapse_stretch = max(
                    collapse_stretch,
                    cyc(int(g[n_lo + u]) - m_lo, int(g[n_lo + v]) - m_lo, m_len),
                )
            for t in range(m_len):
                s = (t + 1) % m_len
                section_stretch = max(
                    section_stretch, cyc(starts[t], starts[s], n_len)
                )
        m_lo += m_len
        n_lo += n_len

    ceil_k = -(-k_const.numerator // k_const.denominator)
    checks = (
        ("witness_inequality", True),
        ("collapse_after_section_identity", section_identity),
        ("displacement_at_most_K", Fraction(max(max_disp_m, max_disp_n)) <= k_const),
        ("collapse_1_lipschitz", collapse_stretch <= 1),
        ("section_ceilK_lipschitz", section_stretch <= ceil_k),
    )
    observed = {
        "maxDisplacementM": float(max_disp_m),
        "maxDisplacementN": float(max_disp_n),
        "collapseStretch": float(collapse_stretch),
        "sectionStretch": float(section_stretch),
    }
    return CoarseMapsReport(
        pairs=tuple(pairs),
        m_lengths=tuple(m_lengths),
        n_lengths=tuple(n_lengths),
        k_const=k_const,
        f=f,
        g=g,
        checks=checks,
        observed=observed,
    )


# ---------------------------------------------------------------------------
# Asymptotic-dimension-one covers.


@dataclass(frozen=True)
class CoverReport:
    lengths: Tuple[int, ...]
    k: int
    pieces: Tuple[Tuple[int, int, int], ...]  # (component, lo, hi) global spans
    short_components: Tuple[int, ...]
    checks: Tuple[Tuple[str, bool], ...]
    observed: Dict[str, int]

    @property
    def passed(self) -> bool:
        return all(ok for _, ok in self.checks)

    def to_json(self) -> dict:
        return {
            "schemaVersion": 1,
            "lengths": list(self.lengths),
            "k": self.k,
            "pieces": [list(p) for p in self.pieces],
            "shortComponents": list(self.short_components),
            "checks": [{"name": nm, "ok": ok} for nm, ok in self.checks],
            "observed": dict(self.observed),
            "passed": self.passed,
        }


def asdim_cover(lengths: Sequence[int], k: int) -> CoverReport:
    """Cover of a cycle window by arcs of length k..2k; dimension-one check.

    Every piece has diameter <= 2k.  Within a component, every set of
    diameter <= k meets at most two pieces; such a set is contained in an
    arc of k+1 consecutive points (or is the whole component when that has
    diameter <= k), so the check enumerates arcs.  Radius-k balls (2k+1
    consecutive points) can meet three pieces; their multiplicity and the
    cross-component spill are reported, not asserted.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    pieces: List[Tuple[int, int, int]] = []
    short: List[int] = []
    pos = 0
    per_comp_pieces: List[List[Tuple[int, int]]] = []
    for ci, length in enumerate(lengths):
        if length < 1:
            raise ValueError("lengths must be >= 1")
        local: List[Tuple[int, int]] = []
        if length < k:
            short.append(ci)
            local.append((0, length))
        else:
            q = -(-length // (2 * k))
            starts = [t * length // q for t in range(q)] + [length]
            local = [(starts[t], starts[t + 1]) for t in range(q)]
        per_comp_pieces.append(local)
        pieces.extend((ci, pos + lo, pos + hi) for lo, hi in local)
        pos += length

    diam_ok = True
    for ci, length in enumerate(lengths):
        for lo, hi in per_comp_pieces[ci]:
            size = hi - lo
            d = length // 2 if size == length else size - 1
            if d > 2 * k:
                diam_ok = False

    def arc_multiplicity(length: int, local: List[Tuple[int, int]], span: int) -> int:
        if len(local) == 1:
            return 1
        owner = [0] * length
        for t, (lo, hi) in enumerate(local):
            for u in range(lo, hi):
                owner[u] = t
        worst = 0
        for s in range(length):
            touched = {owner[(s + u) % length] for u in range(min(span, length))}
            worst = max(worst, len(touched))
        return worst

    diam_mult = 0
    ball_mult = 0
    for ci, length in enumerate(lengths):
        local = per_comp_pieces[ci]
        if length // 2 <= k:
            diam_mult = max(diam_mult, len(local))
        else:
            diam_mult = max(diam_mult, arc_multiplicity(length, local, k + 1))
        ball_mult = max(ball_mult, arc_multiplicity(length, local, 2 * k + 1))

    w = metric_window(list(lengths))
    spill = 0
    for ci in range(len(lengths)):
        lo, hi = w.spans[ci]
        row = w.dist[lo]
        others = (row <= k).sum() - (w.dist[lo, lo:hi] <= k).sum()
        spill = max(spill, int(others))

    checks = (
        ("piece_diameter_at_most_2k", diam_ok),
        ("diameter_k_multiplicity_at_most_2", diam_mult <= 2),
    )
    observed = {
        "diameterKMultiplicity": diam_mult,
        "radiusKBallMultiplicity": ball_mult,
        "crossComponentSpill": spill,
    }
    return CoverReport(
        lengths=tuple(lengths),
        k=k,
        pieces=tuple(pieces),
        short_components=tuple(short),
        checks=checks,
        observed=observed,
    )


# ---------------------------------------------------------------------------
# Band decomposition of matrices over a rotary window.


@dataclass(frozen=True)
class BandMatrix:
    entries: np.ndarray
    lengths: Tuple[int, ...]

    def __post_init__(self):
        arr = np.asarray(self.entries)
        object.__setattr__(self, "entries", arr)
        object.__setattr__(self, "lengths", tuple(int(v) for v in self.lengths))
        n = sum(self.lengths)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError("entries must be a square matrix")
        if arr.shape[0] != n:
            raise ValueError(
                f"matrix size {arr.shape[0]} does not match window mass {n}"
            )


def default_tolerance(t: np.ndarray) -> float:
    if np.issubdtype(t.dtype, np.integer):
        return 0.0
    peak = float(np.abs(t).max()) if t.size else 0.0
    return 1e-12 * peak


def _component_layout(lengths: Sequence[int]):
    comp = []
    off = []
    starts = []
    pos = 0
    for ci, length in enumerate(lengths):
        starts.append(pos)
        comp.extend([ci] * length)
        off.extend(range(length))
        pos += length
    return comp, off, starts


def propagation(bm: BandMatrix, tol: Optional[float] = None) -> int:
    """Largest distance between index pairs carrying a non-negligible entry."""
    if tol is None:
        tol = default_tolerance(bm.entries)
    w = metric_window(list(bm.lengths))
    d = w.dist_input_order()
    nz = np.abs(bm.entries) > tol
    if not nz.any():
        return 0
    return int(d[nz].max())


@dataclass(frozen=True)
class BandDecomposition:
    lengths: Tuple[int, ...]
    bands: Dict[int, np.ndarray]
    residual: np.ndarray
    tol: float

    @property
    def band_range(self) -> int:
        return max((abs(k) for k in self.bands), default=0)

    def reconstruct(self) -> np.ndarray:
        comp, off, starts = _component_layout(self.lengths)
        out = self.residual.copy()
        n = out.shape[0]
        for k, diag in self.bands.items():
            for c in range(n):
                ci = comp[c]
                length = self.lengths[ci]
                if diag[c] == 0:
                    continue
                r = starts[ci] + (off[c] + k) % length
                out[r, c] += diag[c]
        return out

    def to_json(self) -> dict:
        return {
            "schemaVersion": 1,
            "lengths": list(self.lengths),
            "bandIndices": sorted(self.bands),
            "bandRange": self.band_range,
            "residualEntries": int(np.count_nonzero(self.residual)),
            "tolerance": self.tol,
        }


def propagation_decompose(bm: BandMatrix, tol: Optional[float] = None
                          ) -> BandDecomposition:
    """Splits a matrix into diagonal bands along the window's orbits.

    Band k holds the entries T[gamma^k(i), i]; each same-component entry
    lands in exactly one band via the canonical offset (smallest absolute
    power, ties resolved to the positive one).  Cross-component entries go
    to the residual, so residual plus re-placed bands reconstructs T
    entry-for-entry.  The tolerance is recorded for reporting; it affects
    propagation, not the decomposition.
    """
    if tol is None:
        tol = default_tolerance(bm.entries)
    t = bm.entries
    n = t.shape[0]
    comp, off, starts = _component_layout(bm.lengths)
    bands: Dict[int, np.ndarray] = {}
    residual = np.zeros_like(t)
    for c in range(n):
        ci = comp[c]
        length = bm.lengths[ci]
        for r in range(n):
            v = t[r, c]
            if v == 0:
                continue
            if comp[r] != ci:
                residual[r, c] = v
                continue
            k0 = (off[r] - off[c]) % length
            k = k0 if k0 <= length // 2 else k0 - length
            if k not in bands:
                bands[k] = np.zeros(n, dtype=t.dtype)
            bands[k][c] = v
    return BandDecomposition(
        lengths=bm.lengths, bands=bands, residual=residual, tol=tol
    )
