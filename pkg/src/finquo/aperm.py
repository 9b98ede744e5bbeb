"""Almost permutations of N at two scales.

Symbolic scale: an :class:`OrbitSpectrum` records how many orbits of each
shape an almost permutation has (forward one-sided, backward one-sided,
two-sided infinite, finite cycles, finite paths).  The prodigal index is
``n_like - rev_n_like``: the successor map has index +1, its inverse -1, and
the index is additive under composition and flips sign under inverse.

Window scale: a :class:`WindowMap` is an injective partial map on
{0, ..., N-1}, the restriction of an almost permutation to a finite window.
Orbit classification at this scale is conservative: an orbit whose trace
runs into the window edge might continue outside, so it is reported as
``Censored`` with escape-direction annotations instead of being guessed.
The window boundary models the cofinite defect; ``margin`` widens what
counts as the edge (use a margin no smaller than the displacement of the
maps involved when composing shifts).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, Optional, Sequence, Tuple, Union

from .core import (
    OMEGA,
    CensoredOrbitError,
    Count,
    count_add,
    is_omega,
)
from .descriptors import EmptyTail, SequenceDescriptor, finite_descriptor, merge_descriptors


@dataclass(frozen=True)
class WindowMap:
    """Injective partial self-map of {0, ..., n-1}."""

    n: int
    pairs: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("window size must be >= 1")
        pairs = tuple(sorted((int(i), int(j)) for i, j in self.pairs))
        object.__setattr__(self, "pairs", pairs)
        dom = [i for i, _ in pairs]
        ran = [j for _, j in pairs]
        for v in dom + ran:
            if not 0 <= v < self.n:
                raise ValueError(f"point {v} outside window of size {self.n}")
        if len(set(dom)) != len(dom):
            raise ValueError("not a partial map: repeated domain point")
        if len(set(ran)) != len(ran):
            raise ValueError("not injective: repeated image point")

    @cached_property
    def as_dict(self) -> Dict[int, int]:
        return dict(self.pairs)

    def apply(self, i: int) -> Optional[int]:
        return self.as_dict.get(i)

    def domain(self) -> frozenset:
        return frozenset(i for i, _ in self.pairs)

    def image(self) -> frozenset:
        return frozenset(j for _, j in self.pairs)


def compose(f: WindowMap, g: WindowMap) -> WindowMap:
    """The map i -> g(f(i)) where both applications are defined."""
    if f.n != g.n:
        raise ValueError(f"window size mismatch: {f.n} != {g.n}")
    gd = g.as_dict
    pairs = tuple((i, gd[j]) for i, j in f.pairs if j in gd)
    return WindowMap(f.n, pairs)


def inverse(f: WindowMap) -> WindowMap:
    return WindowMap(f.n, tuple((j, i) for i, j in f.pairs))


def difference_set(f: WindowMap, g: WindowMap) -> Tuple[int, ...]:
    """Points where f and g disagree, including one-sided definedness."""
    if f.n != g.n:
        raise ValueError(f"window size mismatch: {f.n} != {g.n}")
    fd, gd = f.as_dict, g.as_dict
    diff = set(fd.keys()) ^ set(gd.keys())
    diff |= {i for i in fd.keys() & gd.keys() if fd[i] != gd[i]}
    return tuple(sorted(diff))


def almost_equal(f: WindowMap, g: WindowMap, threshold: int = 0) -> bool:
    """True iff f and g differ in at most ``threshold`` points."""
    return len(difference_set(f, g)) <= threshold


def separating_set(f: WindowMap, g: WindowMap) -> Tuple[int, ...]:
    """A large subset B of the disagreement set with f[B] and g[B] disjoint.

    Greedy scan in increasing order.  Each selected point i rules out at most
    two later candidates (the unique j with f(j) = g(i) and the unique j'
    with g(j') = f(i)), so |B| >= |A| / 3 where A is the set of points where
    both maps are defined and disagree.
    """
    fd, gd = f.as_dict, g.as_dict
    candidates = sorted(i for i in fd.keys() & gd.keys() if fd[i] != gd[i])
    chosen: list[int] = []
    f_used: set[int] = set()
    g_used: set[int] = set()
    for i in candidates:
        if fd[i] in g_used or gd[i] in f_used:
            continue
        chosen.append(i)
        f_used.add(fd[i])
        g_used.add(gd[i])
    return tuple(chosen)


# ---------------------------------------------------------------------------
# Orbit classification of window maps.


@dataclass(frozen=True)
class FiniteCycle:
    length: int


@dataclass(frozen=True)
class FinitePath:
    length: int


@dataclass(frozen=True)
class Censored:
    """An orbit whose trace exits the defined region at the window edge."""

    forward_escape: bool
    backward_escape: bool


OrbitKind = Union[FiniteCycle, FinitePath, Censored]


def classify_orbits(
    f: WindowMap, margin: int = 1
) -> Tuple[Tuple[Tuple[int, ...], OrbitKind], ...]:
    """Partition the window into f-orbits and classify each one.

    A closed cycle is always a ``FiniteCycle``.  A path whose forward
    endpoint lies in the top ``margin`` positions, or whose backward endpoint
    lies in the bottom ``margin`` positions, might continue outside the
    window and is ``Censored`` with the escape direction recorded; any other
    path is a genuine ``FinitePath``.  Isolated points carry no map evidence
    at all and are paths of length 1 wherever they sit: they model the
    finite defect, not an escaping orbit.
    """
    if margin < 1:
        raise ValueError("margin must be >= 1")
    fwd = f.as_dict
    back = {j: i for i, j in f.pairs}
    unseen = set(range(f.n))
    out = []
    while unseen:
        p = min(unseen)
        # Walk backward at most n steps; returning to p means a cycle.
        q = p
        is_cycle = False
        for _ in range(f.n):
            r = back.get(q)
            if r is None:
                break
            if r == p:
                is_cycle = True
                break
            q = r
        points = [q]
        cur = q
        while True:
            nxt = fwd.get(cur)
            if nxt is None or nxt == q:
                break
            points.append(nxt)
            cur = nxt
        unseen.difference_update(points)
        if is_cycle:
            kind: OrbitKind = FiniteCycle(len(points))
        elif len(points) == 1:
            kind = FinitePath(1)
        else:
            fwd_escape = points[-1] >= f.n - margin
            back_escape = points[0] <= margin - 1
            if fwd_escape or back_escape:
                kind = Censored(fwd_escape, back_escape)
            else:
                kind = FinitePath(len(points))
        out.append((tuple(points), kind))
    return tuple(out)


# ---------------------------------------------------------------------------
# Orbit spectra.


@dataclass(frozen=True)
class OrbitSpectrum:
    """Symbolic orbit census of an almost permutation.

    ``cycles`` describes the multiset of finite-cycle lengths; ``n_like`` and
    ``rev_n_like`` count forward / backward one-sided infinite orbits (always
    finite); ``z_like`` counts two-sided infinite orbits and may be omega;
    ``finite_paths`` lists finite path lengths (deletable up to the almost
    permutation equivalence, kept for window fidelity).
    """

    cycles: SequenceDescriptor = field(default_factory=SequenceDescriptor)
    n_like: int = 0
    rev_n_like: int = 0
    z_like: Count = 0
    finite_paths: Tuple[int, ...] = ()

    def __post_init__(self):
        if self.n_like < 0 or self.rev_n_like < 0:
            raise ValueError("one-sided orbit counts must be >= 0")
        if not is_omega(self.z_like) and self.z_like < 0:
            raise ValueError("z_like must be >= 0 or omega")
        object.__setattr__(self, "finite_paths", tuple(sorted(self.finite_paths)))
        if any(v < 1 for v in self.finite_paths):
            raise ValueError("path lengths must be >= 1")


def shift_spectrum(k: int) -> OrbitSpectrum:
    """Spectrum of a pure shift-like almost permutation of index k."""
    if k >= 0:
        return OrbitSpectrum(n_like=k)
    return OrbitSpectrum(rev_n_like=-k)


@dataclass(frozen=True)
class WindowIndexReport:
    """Index evidence extracted from a window, censored orbits kept separate.

    ``apparent_index`` counts forward-only escaping orbits as forward
    one-sided surrogates (+1) and backward-only escapes as -1; two-sided
    escapes model two-sided orbits and contribute 0, as do all fully
    classified orbits.
    """

    apparent_index: int
    forward_escaping: int
    backward_escaping: int
    two_sided_escaping: int
    cycle_count: int
    path_count: int

    @property
    def censored_count(self) -> int:
        return self.forward_escaping + self.backward_escaping + self.two_sided_escaping

    def to_json(self) -> dict:
        return {
            "apparentIndex": self.apparent_index,
            "forwardEscaping": self.forward_escaping,
            "backwardEscaping": self.backward_escaping,
            "twoSidedEscaping": self.two_sided_escaping,
            "cycleCount": self.cycle_count,
            "pathCount": self.path_count,
            "censoredCount": self.censored_count,
        }


def window_index_report(f: WindowMap, margin: int = 1) -> WindowIndexReport:
    fwd_only = back_only = both = cycles = paths = 0
    for _, kind in classify_orbits(f, margin):
        if isinstance(kind, FiniteCycle):
            cycles += 1
        elif isinstance(kind, FinitePath):
            paths += 1
        elif kind.forward_escape and kind.backward_escape:
            both += 1
        elif kind.forward_escape:
            fwd_only += 1
        else:
            back_only += 1
    return WindowIndexReport(fwd_only - back_only, fwd_only, back_only, both, cycles, paths)


def index(x: Union[WindowMap, OrbitSpectrum], margin: int = 1) -> int:
    """Prodigal index.

    For a spectrum this is ``n_like - rev_n_like`` exactly.  For a window map
    every orbit must be classifiable; censored orbits make the symbolic value
    ambiguous and raise :class:`CensoredOrbitError` (use
    :func:`window_index_report` for the censored-evidence reading).  Fully
    classified window orbits are cycles and paths, each contributing zero.
    """
    if isinstance(x, OrbitSpectrum):
        return x.n_like - x.rev_n_like
    report = window_index_report(x, margin)
    if report.censored_count:
        raise CensoredOrbitError(
            f"{report.censored_count} censored orbit(s); window index is ambiguous"
        )
    return 0


def parity(x: Union[WindowMap, OrbitSpectrum], margin: int = 1) -> int:
    return index(x, margin) % 2


def spectrum_of_window(
    f: WindowMap, margin: int = 1
) -> Tuple[OrbitSpectrum, int]:
    """Spectrum of the classified part of a window, plus the censored count.

    Window classification never emits infinite orbit kinds; escaping orbits
    stay out of the spectrum and are only counted.
    """
    cycles: list[int] = []
    paths: list[int] = []
    censored = 0
    for _, kind in classify_orbits(f, margin):
        if isinstance(kind, FiniteCycle):
            cycles.append(kind.length)
        elif isinstance(kind, FinitePath):
            paths.append(kind.length)
        else:
            censored += 1
    spec = OrbitSpectrum(
        cycles=finite_descriptor(cycles),
        finite_paths=tuple(paths),
    )
    return spec, censored


def direct_sum(
    a: OrbitSpectrum, b: OrbitSpectrum, fallback_modulus: Optional[int] = None
) -> OrbitSpectrum:
    """Disjoint union of orbit censuses; omega absorbs, cycles merge symbolically."""
    return OrbitSpectrum(
        cycles=merge_descriptors(a.cycles, b.cycles, fallback_modulus),
        n_like=a.n_like + b.n_like,
        rev_n_like=a.rev_n_like + b.rev_n_like,
        z_like=count_add(a.z_like, b.z_like),
        finite_paths=a.finite_paths + b.finite_paths,
    )


# ---------------------------------------------------------------------------
# Window constructors.


def rotary_window(lengths: Sequence[int], n: Optional[int] = None, start: int = 0) -> WindowMap:
    """Concatenated cycles: interval k of the given length, mapped cyclically.

    The k-th interval occupies positions [start + sum(lengths[:k]), ...).
    """
    total = start + sum(lengths)
    if n is None:
        n = total
    if total > n:
        raise ValueError(f"lengths need {total} points but window has {n}")
    pairs = []
    pos = start
    for length in lengths:
        if length < 1:
            raise ValueError("cycle lengths must be >= 1")
        for t in range(length):
            pairs.append((pos + t, pos + (t + 1) % length))
        pos += length
    return WindowMap(n, tuple(pairs))


def shift_window(n: int, lo: int, hi: int, k: int = 1) -> WindowMap:
    """The partial map i -> i + k for lo <= i < hi, clipped to the window."""
    pairs = tuple(
        (i, i + k) for i in range(max(lo, 0), min(hi, n)) if 0 <= i + k < n
    )
    return WindowMap(n, pairs)


def interval_bounds(lengths: Sequence[int], start: int = 0) -> Tuple[Tuple[int, int], ...]:
    """Half-open [lo, hi) bounds of the concatenated intervals."""
    out = []
    pos = start
    for length in lengths:
        out.append((pos, pos + length))
        pos += length
    return tuple(out)
