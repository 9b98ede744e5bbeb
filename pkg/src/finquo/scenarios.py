"""Named end-to-end constructions emitted as self-verifying reports.

Each scenario builds its inputs from scratch, runs the relevant deciders,
asserts the expected verdicts, and returns a JSON-ready report that is
deterministic for fixed inputs.
"""

from __future__ import annotations

from typing import Dict, List, Optional, Tuple

from .aperm import OrbitSpectrum
from .canon import component_count, star_property
from .core import OMEGA, BudgetExceededError, count_to_json
from .descriptors import AffineTail, GeometricTail, SequenceDescriptor
from .digraph import build_embedding
from .fmcheck.hintikka import ghasemi_subsequence, hintikka_type
from .fmcheck.obstruction import obstruction_truth

SCHEMA = 1


def scenario_parity() -> dict:
    """Index parity catalog: the pairing property holds iff the parity is 0.

    Covers the one-sided shift, its inverse, their double, a two-sided
    shift, the sum of all two-sided shifts, and that sum plus a one-sided
    shift (the odd unpartnered case).
    """
    catalog = [
        ("one_sided_shift", OrbitSpectrum(n_like=1)),
        ("one_sided_shift_inverse", OrbitSpectrum(rev_n_like=1)),
        ("double_one_sided_shift", OrbitSpectrum(n_like=2)),
        ("two_sided_shift", OrbitSpectrum(z_like=1)),
        ("all_two_sided_shifts", OrbitSpectrum(z_like=OMEGA)),
        ("all_two_sided_shifts_plus_one_sided", OrbitSpectrum(n_like=1, z_like=OMEGA)),
    ]
    expected = {
        "one_sided_shift": (1, 1, 1, False),
        "one_sided_shift_inverse": (-1, 1, 1, False),
        "double_one_sided_shift": (2, 0, 2, True),
        "two_sided_shift": (0, 0, 2, True),
        "all_two_sided_shifts": (0, 0, "omega", True),
        "all_two_sided_shifts_plus_one_sided": (1, 1, "omega", False),
    }
    rows = []
    ok = True
    for name, spec in catalog:
        idx = spec.n_like - spec.rev_n_like
        par = idx % 2
        comps = count_to_json(component_count(spec))
        star = star_property(spec)
        exp = expected[name]
        row_ok = (idx, par, comps, star) == exp and star == (par == 0)
        ok = ok and row_ok
        rows.append(
            {
                "name": name,
                "index": idx,
                "parity": par,
                "components": comps,
                "star": star,
                "expected": list(exp),
                "ok": row_ok,
            }
        )
    return {
        "schemaVersion": SCHEMA,
        "scenario": "parity",
        "rows": rows,
        "equivalenceChecked": "star holds iff parity is 0",
        "passed": ok,
    }


def scenario_biembeddable(intervals: int = 6) -> dict:
    """Two rotary systems that embed into each other yet differ elementarily.

    Cycle lengths 4^i on one side and 2*4^j on the other: the identity
    index map embeds the first into the second (each length divides its
    double), and shifting by one embeds the second into the first.  The
    eventual-residue sentences mod 3 separate them: 4^i is always 1 mod 3,
    2*4^j always 2.
    """
    if intervals < 1:
        raise ValueError("intervals must be >= 1")
    m_desc = SequenceDescriptor((), GeometricTail(1, 4))
    n_desc = SequenceDescriptor((), GeometricTail(2, 4))
    fwd_emb, fwd_rep = build_embedding(m_desc, n_desc, "id", window=intervals)
    rev_emb, rev_rep = build_embedding(n_desc, m_desc, "shift:1", window=intervals)
    obstructions = []
    separated = False
    for (m, j) in ((3, 1), (3, 2)):
        va = obstruction_truth(m_desc, m, j, "eventual")
        vb = obstruction_truth(n_desc, m, j, "eventual")
        if va.verdict != vb.verdict:
            separated = True
        obstructions.append(
            {
                "modulus": m,
                "residue": j,
                "left": va.to_json(),
                "right": vb.to_json(),
                "separates": va.verdict != vb.verdict,
            }
        )
    passed = fwd_rep.passed and rev_rep.passed and separated
    return {
        "schemaVersion": SCHEMA,
        "scenario": "biembeddable",
        "intervals": intervals,
        "left": m_desc.to_json(),
        "right": n_desc.to_json(),
        "forwardEmbedding": fwd_emb.to_json(),
        "forwardReport": fwd_rep.to_json(),
        "reverseEmbedding": rev_emb.to_json(),
        "reverseReport": rev_rep.to_json(),
        "obstructions": obstructions,
        "elementarilySeparated": separated,
        "passed": passed,
    }


def _branch_indices(code: int, depth: int) -> List[int]:
    """Binary-branching index set: level n contributes 2^n + (code mod 2^n).

    Distinct codes agree only on the levels where their binary digits
    coincide, so two such sets intersect in finitely many elements.
    """
    return [(1 << n) + (code % (1 << n)) for n in range(1, depth + 1)]


def _stabilize(base: SequenceDescriptor, rank: int,
               window: Tuple[int, int]):
    """Ghasemi report plus a derived descriptor for the chosen type class.

    Falls back to the longest constant-step suffix of the chosen class when
    the whole class is not an arithmetic progression.  A singleton class
    stabilizes nothing: the base is returned unchanged and the caller's
    type-agreement check is left to fail honestly.
    """
    report = ghasemi_subsequence(base, rank=rank, window=window)
    if report.derived is not None:
        return report, report.derived, "largest_class"
    chosen = report.chosen_indices
    if len(chosen) < 2:
        return report, base, "unstabilized"
    step = chosen[-1] - chosen[-2]
    start_pos = len(chosen) - 2
    while start_pos > 0 and chosen[start_pos] - chosen[start_pos - 1] == step:
        start_pos -= 1
    derived = base.subsample(chosen[start_pos], step)
    return report, derived, "class_suffix"


def scenario_nonconjugate_family(count: int = 4, rank: int = 0,
                                 depth: int = 8,
                                 base: Optional[SequenceDescriptor] = None) -> dict:
    """A family of rotary systems: same rank-bounded limit types, pairwise
    inequivalent cycle structures.

    Sizes come from one type class of a stabilized base sequence, sampled
    along almost-disjoint binary-branching index sets.  Pairwise, the index
    sets share only finitely many elements (listed) and the sizes are
    strictly increasing, so cycle-length multisets agree only on a finite
    set while every member realizes the same observed type class.

    The continuum-sized family is realized at a finite count with the same
    branching shape; the scale substitution is stated in the report.  The
    default rank is 0: higher ranks separate every computable size, so an
    increasing base admits no in-budget single-type class there and the
    type-agreement check reports the failure instead of pretending.
    """
    if not 1 <= count <= 32:
        raise ValueError("count must be between 1 and 32")
    if rank < 0:
        raise ValueError("rank must be >= 0")
    if base is None:
        base = SequenceDescriptor((), AffineTail(1, 2))
    window = (0, 12) if rank <= 1 else (0, 8)
    report, derived, how = _stabilize(base, rank, window)

    sample = [derived.value(i) for i in range(8)]
    increasing = all(a < b for a, b in zip(sample, sample[1:]))

    members = []
    for c in range(count):
        idx = _branch_indices(c, depth)
        members.append(
            {
                "branch": c,
                "indices": idx,
                "sizes": [derived.value(i) for i in idx],
            }
        )

    # Rank-d types of the in-budget member sizes must all coincide.
    small_sizes = sorted(
        {s for m in members for s in m["sizes"] if s <= 12}
    )
    type_hashes = []
    for s in small_sizes:
        try:
            type_hashes.append(hintikka_type(s, rank).content_hash)
        except BudgetExceededError:
            pass
    single_type = len(set(type_hashes)) <= 1

    pairwise = []
    disjoint_ok = True
    for a in range(count):
        for b in range(a + 1, count):
            shared = sorted(set(members[a]["indices"]) & set(members[b]["indices"]))
            proper = len(shared) < depth
            disjoint_ok = disjoint_ok and proper
            pairwise.append(
                {
                    "a": a,
                    "b": b,
                    "sharedIndices": shared,
                    "sharedSizes": [derived.value(i) for i in shared],
                    "finiteIntersection": proper,
                }
            )

    passed = increasing and single_type and disjoint_ok
    return {
        "schemaVersion": SCHEMA,
        "scenario": "nonconjugate_family",
        "scaleSubstitution": (
            "the continuum-sized almost-disjoint family is sampled at "
            f"{count} branches of depth {depth}"
        ),
        "count": count,
        "rank": rank,
        "base": base.to_json(),
        "stabilization": report.to_json(),
        "derived": derived.to_json(),
        "derivedFrom": how,
        "members": members,
        "pairwise": pairwise,
        "checks": {
            "sizesStrictlyIncreasing": increasing,
            "smallSizesSingleType": single_type,
            "smallSizesChecked": small_sizes,
            "pairwiseFiniteIntersections": disjoint_ok,
        },
        "passed": passed,
    }
