"""End-to-end scenario reports built from the library primitives."""
import pytest

from finquo.descriptors import ConstantTail, SequenceDescriptor
from finquo.scenarios import (
    scenario_biembeddable,
    scenario_nonconjugate_family,
    scenario_parity,
)


# --- parity catalog ---------------------------------------------------------

def test_parity_catalog_passes():
    r = scenario_parity()
    assert r["passed"]
    assert len(r["rows"]) == 6
    assert all(row["ok"] for row in r["rows"])


def test_parity_rows_cover_the_shift_family():
    names = [row["name"] for row in scenario_parity()["rows"]]
    assert "one_sided_shift" in names
    assert "two_sided_shift" in names
    assert "all_two_sided_shifts" in names


def test_parity_star_matches_even_parity():
    for row in scenario_parity()["rows"]:
        assert row["star"] == (row["parity"] == 0)


# --- biembeddable but separated ---------------------------------------------

def test_biembeddable_default_passes():
    r = scenario_biembeddable()
    assert r["passed"]
    assert r["forwardReport"]["passed"] and r["reverseReport"]["passed"]
    assert r["forwardEmbedding"]["fMap"] == list(range(6))
    assert r["reverseEmbedding"]["fMap"][0] is None
    assert set(r["forwardEmbedding"]["wrapCounts"]) == {2}


def test_biembeddable_separation_is_mutual():
    r = scenario_biembeddable()
    assert r["elementarilySeparated"]
    assert any(o["separates"] for o in r["obstructions"])
    verdicts = {
        (o["left"]["verdict"], o["right"]["verdict"]) for o in r["obstructions"]
    }
    # each obstruction sentence holds on exactly one side
    assert verdicts <= {("yes", "no"), ("no", "yes")}
    assert len(verdicts) == 2


def test_biembeddable_shrunk_window():
    r = scenario_biembeddable(intervals=2)
    assert r["passed"]
    assert r["forwardEmbedding"]["sourceLengths"] == [1, 4]


def test_biembeddable_interval_bound():
    with pytest.raises(ValueError):
        scenario_biembeddable(intervals=0)


# --- almost-disjoint branch family ------------------------------------------

def test_family_default_passes():
    r = scenario_nonconjugate_family()
    assert r["passed"]
    checks = r["checks"]
    assert checks["sizesStrictlyIncreasing"]
    assert checks["smallSizesSingleType"]
    assert checks["pairwiseFiniteIntersections"]
    assert r["rank"] == 0
    assert "sampled at 4 branches" in r["scaleSubstitution"]


def test_family_members_are_branch_sets():
    r = scenario_nonconjugate_family(count=3, depth=6)
    assert len(r["members"]) == 3
    for member in r["members"]:
        assert len(member["indices"]) == 6
        sizes = member["sizes"]
        assert sizes == sorted(sizes) and len(set(sizes)) == len(sizes)


def test_family_pairwise_intersections_are_finite_and_small():
    r = scenario_nonconjugate_family(count=4, depth=8)
    for pair in r["pairwise"]:
        assert pair["finiteIntersection"]
        # distinct branches agree only below their split level
        assert len(pair["sharedIndices"]) < 8


def test_family_rank1_fails_honestly():
    # at rank 1 every size in budget has its own type: no single-type class
    r = scenario_nonconjugate_family(rank=1)
    assert not r["passed"]
    assert not r["checks"]["smallSizesSingleType"]
    assert r["stabilization"]["derived"] is None


def test_family_constant_base_emits_both_verdicts():
    base = SequenceDescriptor((), ConstantTail(6))
    r = scenario_nonconjugate_family(count=2, rank=1, base=base)
    assert not r["checks"]["sizesStrictlyIncreasing"]
    assert r["checks"]["smallSizesSingleType"]
    assert not r["passed"]


def test_family_single_member_is_vacuous():
    r = scenario_nonconjugate_family(count=1)
    assert r["passed"]
    assert r["pairwise"] == []


def test_family_count_bounds():
    for bad in (0, -2, 40):
        with pytest.raises(ValueError):
            scenario_nonconjugate_family(count=bad)
