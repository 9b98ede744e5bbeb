"""Canonical decomposition and conjugacy classification of orbit spectra.

Every almost permutation is equivalent (up to finite changes and deletion of
finite paths) to a direct sum R + Z + S where R is rotary (all orbits finite
cycles, nonempty only when there are infinitely many of them), Z is a sum of
two-sided shifts, and S is a one-sided power of the successor determined by
the index k = n_like - rev_n_like.  The surplus min(n_like, rev_n_like) of
paired one-sided orbits is absorbed into the Z part.

Three equivalences are decided here, coarsest to finest:

* trivial conjugacy: equal index, equal Z part, rotary parts equal as
  multisets mod finite;
* potential conjugacy (conjugacy achievable in some forcing extension):
  equal parity plus elementary equivalence of the induced structures, here
  checked by exact arithmetic obstructions and rank-bounded limit-type sets;
* the pairing property (*): holds iff the parity is 0.

Decisions return :class:`finquo.core.Tri`; a "yes" from the rank-bounded
check certifies agreement up to the requested rank, not full elementary
equivalence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

from .aperm import OrbitSpectrum
from .core import (
    OMEGA,
    Budget,
    Count,
    DEFAULT_BUDGET,
    Tri,
    count_add,
    count_eq,
    count_to_json,
    is_omega,
)
from .descriptors import (
    AffineTail,
    ConstantTail,
    EmptyTail,
    FactorialTail,
    GeometricTail,
    ResidueTail,
    SequenceDescriptor,
)


@dataclass(frozen=True)
class Decomposition:
    """R + Z + S data: rotary cycle multiset, two-sided count, index."""

    rotary: SequenceDescriptor
    z_part: Count
    s_part: int

    def to_json(self) -> dict:
        return {
            "rotary": self.rotary.to_json(),
            "zPart": count_to_json(self.z_part),
            "sPart": self.s_part,
        }


def decompose(s: OrbitSpectrum) -> Decomposition:
    """Canonical decomposition of a spectrum.

    Finite paths are deleted.  A finite collection of finite cycles is
    absorbed (empty rotary part); the rotary part is kept only when the cycle
    multiset is infinite.  Paired one-sided orbits turn into two-sided ones.
    """
    s_part = s.n_like - s.rev_n_like
    z_part = count_add(s.z_like, min(s.n_like, s.rev_n_like))
    rotary = s.cycles if not s.cycles.is_finite else SequenceDescriptor()
    return Decomposition(rotary, z_part, s_part)


def component_count(s: OrbitSpectrum) -> Count:
    """Number of atoms of the fixed-point algebra of the induced map.

    Each one-sided orbit contributes one atom, each two-sided orbit two;
    finite orbits contribute none.
    """
    if is_omega(s.z_like):
        return OMEGA
    return s.n_like + s.rev_n_like + 2 * s.z_like


def star_property(s: OrbitSpectrum) -> bool:
    """The pairing property: components admit a pairing iff the index is even."""
    return (s.n_like - s.rev_n_like) % 2 == 0


def ch_normal_form(s: OrbitSpectrum) -> OrbitSpectrum:
    """Normal form under rewrites that preserve conjugacy when the continuum
    hypothesis holds: a backward one-sided orbit may be replaced by a forward
    one, and a pair of one-sided orbits by a single two-sided orbit.

    The result has rev_n_like = 0 and n_like in {0, 1} (the index parity);
    cycles and finite paths are untouched.  Idempotent, parity-preserving.
    """
    one_sided = s.n_like + s.rev_n_like
    par = one_sided % 2
    return OrbitSpectrum(
        cycles=s.cycles,
        n_like=par,
        rev_n_like=0,
        z_like=count_add(s.z_like, one_sided // 2),
        finite_paths=s.finite_paths,
    )


@dataclass(frozen=True)
class SaturationClass:
    label: str  # "Saturated" | "NotSaturated"
    z_part: Count
    reason: str

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "zPart": count_to_json(self.z_part),
            "reason": self.reason,
        }


def saturation_class(s: OrbitSpectrum) -> SaturationClass:
    """Countable saturation of the induced quotient structure.

    Saturation fails exactly when the two-sided part is the full two-sided
    shift, i.e. when the decomposition's z count is omega.
    """
    d = decompose(s)
    if is_omega(d.z_part):
        return SaturationClass(
            "NotSaturated", d.z_part, "z part is the full two-sided shift (omega)"
        )
    return SaturationClass("Saturated", d.z_part, "z part is a finite sum of two-sided shifts")


# ---------------------------------------------------------------------------
# Rotary multiset equivalence (mod finite).


def _normalize_tail(tail):
    if isinstance(tail, AffineTail) and tail.slope == 0:
        return ConstantTail(tail.intercept)
    return tail


def _sound_moduli(ta, tb, bound: int) -> list[int]:
    """Moduli m for which both tails' residue streams are fully specified.

    Concrete tails determine residues for every m; a residue table only for
    divisors of its modulus.
    """
    cap = None
    for t in (ta, tb):
        if isinstance(t, ResidueTail):
            cap = t.modulus if cap is None else math.gcd(cap, t.modulus)
    if cap is None:
        return [m for m in range(2, bound + 1)]
    return [m for m in range(2, bound + 1) if cap % m == 0]


def _residue_density_obstruction(ta, tb, bound: int = 12) -> Optional[dict]:
    """A modulus where the long-run residue densities of the tails differ.

    If, per unit index, one tail produces residue r mod m with a different
    frequency than the other, the two multisets differ in infinitely many
    elements, refuting equivalence mod finite.
    """
    for m in _sound_moduli(ta, tb, bound):
        _, cyc_a = ta.residues(m)
        _, cyc_b = tb.residues(m)
        if not cyc_a or not cyc_b:
            continue
        for r in range(m):
            da = cyc_a.count(r) / len(cyc_a)
            db = cyc_b.count(r) / len(cyc_b)
            if da != db:
                return {"modulus": m, "residue": r, "density_a": da, "density_b": db}
    return None


def _is_power_of(q: int, r: int) -> bool:
    if q < 1:
        return False
    while q % r == 0:
        q //= r
    return q == 1


def rotary_equivalent(a: SequenceDescriptor, b: SequenceDescriptor) -> Tri:
    """Equality of the generated multisets up to finitely many elements.

    Finite prefixes never matter.  Decidable pairs: identical tails; any pair
    of concrete tails (constant, affine, geometric, factorial) via growth and
    progression analysis; residue-table pairs only when a residue-density
    obstruction applies, else unknown (the table leaves magnitudes open).
    """
    ta = _normalize_tail(a.tail)
    tb = _normalize_tail(b.tail)
    if ta == tb:
        return Tri.yes("identical tails; prefixes differ in finitely many elements")
    empty_a, empty_b = isinstance(ta, EmptyTail), isinstance(tb, EmptyTail)
    if empty_a and empty_b:
        return Tri.yes("both multisets finite")
    if empty_a != empty_b:
        return Tri.no("one multiset is finite, the other infinite")

    obstruction = _residue_density_obstruction(ta, tb)
    if obstruction is not None:
        return Tri.no("residue density obstruction", **obstruction)
    if isinstance(ta, ResidueTail) or isinstance(tb, ResidueTail):
        return Tri.unknown("residue table underdetermines element magnitudes")

    classes = {
        ConstantTail: "constant",
        AffineTail: "arithmetic",
        GeometricTail: "geometric",
        FactorialTail: "factorial",
    }
    ca, cb = classes[type(ta)], classes[type(tb)]
    if ca != cb:
        return Tri.no(
            "growth class mismatch forces infinite multiset difference",
            class_a=ca,
            class_b=cb,
        )
    if isinstance(ta, ConstantTail):
        if ta.value_ == tb.value_:
            return Tri.yes("equal eventual constants")
        return Tri.no("distinct eventual constants", value_a=ta.value_, value_b=tb.value_)
    if isinstance(ta, AffineTail):
        if ta.slope == tb.slope and (ta.intercept - tb.intercept) % ta.slope == 0:
            return Tri.yes("same arithmetic progression up to a finite shift")
        return Tri.no(
            "arithmetic progressions differ in infinitely many elements",
            slope_a=ta.slope,
            slope_b=tb.slope,
        )
    if isinstance(ta, GeometricTail):
        if ta.ratio != tb.ratio:
            return Tri.no(
                "geometric ratios differ; counting functions diverge",
                ratio_a=ta.ratio,
                ratio_b=tb.ratio,
            )
        big, small = max(ta.coefficient, tb.coefficient), min(ta.coefficient, tb.coefficient)
        if big % small == 0 and _is_power_of(big // small, ta.ratio):
            return Tri.yes("same geometric values up to an index shift")
        return Tri.no(
            "geometric coefficients not related by a ratio power",
            coefficient_a=ta.coefficient,
            coefficient_b=tb.coefficient,
        )
    if isinstance(ta, FactorialTail):
        return Tri.yes("factorial tails agree up to an index shift")
    return Tri.unknown(f"unsupported tail pair {ta.kind}/{tb.kind}")


def trivially_conjugate(a: OrbitSpectrum, b: OrbitSpectrum) -> Tri:
    """Conjugacy by an almost permutation, decided on decompositions."""
    da, db = decompose(a), decompose(b)
    if da.s_part != db.s_part:
        return Tri.no(
            "index obstruction: one-sided parts differ",
            s_part_a=da.s_part,
            s_part_b=db.s_part,
        )
    if not count_eq(da.z_part, db.z_part):
        return Tri.no(
            "two-sided part differs",
            z_part_a=count_to_json(da.z_part),
            z_part_b=count_to_json(db.z_part),
        )
    inner = rotary_equivalent(da.rotary, db.rotary)
    if inner.is_yes:
        return Tri.yes("decompositions agree", rotary=inner.to_json())
    if inner.is_no:
        return Tri.no("rotary parts inequivalent", rotary=inner.to_json())
    return Tri.unknown("rotary comparison inconclusive", rotary=inner.to_json())


# ---------------------------------------------------------------------------
# Potential conjugacy.


def potentially_conjugate(
    a: OrbitSpectrum,
    b: OrbitSpectrum,
    rank: int = 2,
    budget: Budget = DEFAULT_BUDGET,
    arithmetic_bound: int = 6,
    window: Optional[range] = None,
) -> Tri:
    """Conjugacy achievable after forcing: same parity plus elementary
    equivalence of the induced structures.

    Parity and component counts are exact first-order obstructions.  With
    those equal, the one-sided and two-sided normal forms coincide, and the
    remaining content is elementary equivalence of the rotary parts: checked
    by exact eventual-residue obstructions (small moduli) and by rank-bounded
    limit-type sets.  A "yes" certifies agreement up to the given rank only.
    """
    from .fmcheck.hintikka import reduced_product_ee
    from .fmcheck.obstruction import obstruction_truth

    pa = (a.n_like - a.rev_n_like) % 2
    pb = (b.n_like - b.rev_n_like) % 2
    if pa != pb:
        return Tri.no("parity obstruction", parity_a=pa, parity_b=pb)
    ca, cb = component_count(a), component_count(b)
    if not count_eq(ca, cb):
        return Tri.no(
            "component count differs (first-order expressible)",
            components_a=count_to_json(ca),
            components_b=count_to_json(cb),
        )
    da, db = decompose(a), decompose(b)
    ra, rb = da.rotary, db.rotary
    empty_a, empty_b = ra.is_finite, rb.is_finite
    if empty_a and empty_b:
        return Tri.yes(
            "parity and component counts agree; empty rotary parts",
            parity=pa,
            components=count_to_json(ca),
        )
    if empty_a != empty_b:
        return Tri.no(
            "rotary part presence differs (first-order: a nonzero remainder "
            "below the component supremum exists on one side only)"
        )
    same = rotary_equivalent(ra, rb)
    if same.is_yes:
        return Tri.yes(
            "parity and component counts agree; rotary parts equal mod finite",
            parity=pa,
            rotary=same.to_json(),
        )
    # Exact arithmetic obstructions on the rotary parts.
    for m in _sound_moduli(ra.tail, rb.tail, arithmetic_bound):
        for j in range(m):
            for mode in ("eventual", "infinitely_often"):
                va = obstruction_truth(ra, m, j, mode)
                vb = obstruction_truth(rb, m, j, mode)
                if va.verdict != vb.verdict:
                    return Tri.no(
                        "arithmetic obstruction: residue sentence separates the "
                        "rotary parts",
                        modulus=m,
                        residue=j,
                        mode=mode,
                        verdict_a=va.verdict,
                        verdict_b=vb.verdict,
                    )
    # Rank-bounded limit-type comparison.
    certificates = []
    for d in range(rank + 1):
        ee = reduced_product_ee(ra, rb, d, window=window, budget=budget)
        if ee.is_no:
            return Tri.no("limit type sets differ", rank=d, inner=ee.to_json())
        if ee.is_unknown:
            return Tri.unknown(
                "limit type comparison inconclusive", rank=d, inner=ee.to_json()
            )
        certificates.append(ee.to_json())
    return Tri.yes(
        "parity, normal forms, arithmetic scan and limit type sets agree up to rank",
        rank=rank,
        certificates=certificates,
    )


# ---------------------------------------------------------------------------
# Orbit selection.


@dataclass(frozen=True)
class OrbitSelector:
    """Selection of a sub-collection of finite orbits, expressible on the
    descriptor: an explicit subset of prefix positions plus an arithmetic
    subsampling of tail indices (or tail_start=None to drop the tail)."""

    prefix_indices: Optional[Tuple[int, ...]] = None  # None keeps all
    tail_start: Optional[int] = 0
    tail_step: int = 1


def restrict_to_orbits(s: OrbitSpectrum, selector: OrbitSelector) -> OrbitSpectrum:
    """Restriction of a pure rotary spectrum to selected orbits."""
    if s.n_like or s.rev_n_like or not count_eq(s.z_like, 0) or s.finite_paths:
        raise ValueError("restrict_to_orbits requires a pure rotary spectrum")
    cycles = s.cycles
    if selector.prefix_indices is None:
        prefix = list(cycles.prefix)
    else:
        for i in selector.prefix_indices:
            if not 0 <= i < len(cycles.prefix):
                raise ValueError(f"prefix index {i} out of range")
        prefix = [cycles.prefix[i] for i in selector.prefix_indices]
    if selector.tail_start is None or cycles.is_finite:
        tail = EmptyTail()
    else:
        tail = cycles.subsample(selector.tail_start, selector.tail_step).tail
    return OrbitSpectrum(cycles=SequenceDescriptor(tuple(sorted(prefix)), tail))
