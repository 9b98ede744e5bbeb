"""Canonical decomposition and the conjugacy-style deciders."""
import itertools
import random

import pytest

from finquo.aperm import (
    OrbitSpectrum,
    WindowMap,
    classify_orbits,
    index,
    parity,
    rotary_window,
    spectrum_of_window,
)
from finquo.canon import (
    OrbitSelector,
    ch_normal_form,
    component_count,
    decompose,
    potentially_conjugate,
    restrict_to_orbits,
    rotary_equivalent,
    saturation_class,
    star_property,
    trivially_conjugate,
)
from finquo.core import OMEGA, SelectorError, is_omega
from finquo.descriptors import (
    AffineTail,
    ConstantTail,
    EmptyTail,
    GeometricTail,
    ResidueTail,
    SequenceDescriptor,
    finite_descriptor,
)

from conftest import random_interior_map

SIGMA = OrbitSpectrum(n_like=1)
SIGMA_INV = OrbitSpectrum(rev_n_like=1)
GEO_EVEN = SequenceDescriptor((), GeometricTail(1, 4))   # 4^j = 2^{2j}
GEO_ODD = SequenceDescriptor((), GeometricTail(2, 4))    # 2*4^j = 2^{2j+1}


# --- decompose -------------------------------------------------------------

def test_decompose_pairs_one_sided_orbits():
    s = OrbitSpectrum(
        cycles=SequenceDescriptor((), ConstantTail(4)),
        n_like=3, rev_n_like=1, z_like=2,
    )
    d = decompose(s)
    assert d.s_part == 2
    assert d.z_part == 3
    assert d.rotary == s.cycles


def test_decompose_empty_spectrum():
    d = decompose(OrbitSpectrum())
    assert d.s_part == 0
    assert d.z_part == 0
    assert d.rotary.is_finite and d.rotary.prefix == ()


def test_decompose_omega_absorbs():
    d = decompose(OrbitSpectrum(n_like=1, rev_n_like=1, z_like=OMEGA))
    assert d.s_part == 0
    assert is_omega(d.z_part)


def test_decompose_drops_finite_cycle_sets_and_paths():
    s = OrbitSpectrum(cycles=finite_descriptor([2, 3]), finite_paths=(4,))
    d = decompose(s)
    assert d.rotary.prefix == ()
    assert isinstance(d.rotary.tail, EmptyTail)


def test_decompose_window_oracle(rng):
    """Rearranging a window into its R|Z|S block layout keeps the spectrum.

    Orbits are relocated to contiguous blocks (cycles first, then paths) by
    a window permutation; classification of the conjugated map must agree.
    """
    for _ in range(60):
        n = 24
        f = random_interior_map(rng, n)
        orbits = classify_orbits(f)
        # lay orbits out one after another, keeping them inside the margin
        perm = {}
        pos = 1
        for pts, _kind in sorted(orbits, key=lambda o: (len(o[0]), o[0])):
            if len(pts) == 1 and not pts[0] in {i for i, _ in f.pairs} | {
                j for _, j in f.pairs
            }:
                continue  # untouched points get the leftover slots
            for p in pts:
                perm[p] = pos
                pos += 1
        free = sorted(set(range(n)) - set(perm.values()))
        for p in range(n):
            if p not in perm:
                perm[p] = free.pop()
        g = WindowMap(n, tuple((perm[i], perm[j]) for i, j in f.pairs))
        sf, cf = spectrum_of_window(f)
        sg, cg = spectrum_of_window(g)
        assert (sf, cf) == (sg, cg), f.pairs


# --- component count and the pairing property ------------------------------

def test_component_count_examples():
    assert component_count(SIGMA) == 1
    assert component_count(OrbitSpectrum(n_like=1, z_like=3)) == 7
    assert is_omega(component_count(OrbitSpectrum(z_like=OMEGA)))


def test_star_property_examples():
    assert not star_property(SIGMA)
    assert star_property(OrbitSpectrum(n_like=1, rev_n_like=1))
    assert not star_property(OrbitSpectrum(n_like=1, z_like=OMEGA))


def test_star_property_equals_even_parity_catalog():
    zs = [0, 1, 2, 3, OMEGA]
    for n, r, z in itertools.product(range(4), range(4), zs):
        s = OrbitSpectrum(n_like=n, rev_n_like=r, z_like=z)
        assert star_property(s) == (parity(s) == 0), (n, r, z)
        if not is_omega(component_count(s)):
            assert (component_count(s) % 2 == 0) == star_property(s)


# --- normal form and saturation --------------------------------------------

def test_ch_normal_form_flips_and_pairs():
    s = OrbitSpectrum(rev_n_like=3)
    nf = ch_normal_form(s)
    assert (nf.n_like, nf.rev_n_like, nf.z_like) == (1, 0, 1)


def test_ch_normal_form_fixed_point_and_absorption():
    s0 = OrbitSpectrum(cycles=finite_descriptor([5]))
    assert ch_normal_form(s0) == s0
    s = OrbitSpectrum(n_like=2, z_like=OMEGA)
    nf = ch_normal_form(s)
    assert nf.n_like == 0 and is_omega(nf.z_like)


def test_ch_normal_form_idempotent_and_parity_preserving():
    for n, r, z in itertools.product(range(4), range(4), [0, 2, OMEGA]):
        s = OrbitSpectrum(n_like=n, rev_n_like=r, z_like=z)
        nf = ch_normal_form(s)
        assert ch_normal_form(nf) == nf
        assert parity(nf) == parity(s)
        assert nf.n_like in (0, 1) and nf.rev_n_like == 0


def test_saturation_class():
    assert saturation_class(OrbitSpectrum(z_like=OMEGA)).label == "NotSaturated"
    rotary = OrbitSpectrum(cycles=SequenceDescriptor((), ConstantTail(3)))
    assert saturation_class(rotary).label == "Saturated"
    assert saturation_class(SIGMA).label == "Saturated"
    # pairing one-sided orbits cannot build omega-many two-sided ones
    assert saturation_class(OrbitSpectrum(n_like=3, rev_n_like=3)).label == "Saturated"


# --- rotary equivalence ----------------------------------------------------

def test_rotary_equivalent_mod_finite():
    a = SequenceDescriptor((3, 3, 5), ConstantTail(7))
    b = SequenceDescriptor((5,), ConstantTail(7))
    assert rotary_equivalent(a, b).is_yes


def test_rotary_equivalent_value_sets_disjoint():
    t = rotary_equivalent(GEO_EVEN, GEO_ODD)
    assert t.is_no


def test_rotary_equivalent_residue_table_unknown():
    a = SequenceDescriptor((), AffineTail(2, 2))
    b = SequenceDescriptor((), ResidueTail(2, (0,), 0))
    assert rotary_equivalent(a, b).is_unknown


def test_rotary_equivalent_reflexive():
    for desc in (GEO_EVEN, SequenceDescriptor((2,), ConstantTail(9))):
        assert rotary_equivalent(desc, desc).is_yes


# --- trivially_conjugate ---------------------------------------------------

def test_trivially_conjugate_sigma_pair():
    t = trivially_conjugate(SIGMA, SIGMA_INV)
    assert t.is_no
    assert "index" in t.reason


def test_trivially_conjugate_reflexive_symmetric():
    specs = [
        SIGMA,
        OrbitSpectrum(cycles=SequenceDescriptor((), ConstantTail(3)), z_like=1),
        OrbitSpectrum(n_like=2, rev_n_like=2),
    ]
    for s in specs:
        assert trivially_conjugate(s, s).is_yes
    for a, b in itertools.combinations(specs, 2):
        assert trivially_conjugate(a, b).verdict == trivially_conjugate(b, a).verdict


def test_trivially_conjugate_unknown_propagates():
    a = OrbitSpectrum(cycles=SequenceDescriptor((), AffineTail(2, 2)))
    b = OrbitSpectrum(cycles=SequenceDescriptor((), ResidueTail(2, (0,), 0)))
    assert trivially_conjugate(a, b).is_unknown


# --- potentially_conjugate -------------------------------------------------

def test_potentially_conjugate_sigma_pair_yes():
    for rank in (0, 1, 2):
        t = potentially_conjugate(SIGMA, SIGMA_INV, rank=rank)
        assert t.is_yes, (rank, t.reason)


def test_potentially_conjugate_mod3_obstruction():
    a = OrbitSpectrum(cycles=GEO_EVEN)
    b = OrbitSpectrum(cycles=GEO_ODD)
    t = potentially_conjugate(a, b, rank=1)
    assert t.is_no
    assert t.detail.get("modulus") == 3


def test_potentially_conjugate_parity_obstruction():
    a = OrbitSpectrum(n_like=1, z_like=OMEGA)
    b = OrbitSpectrum(z_like=OMEGA)
    t = potentially_conjugate(a, b)
    assert t.is_no
    assert "parity" in t.reason


def test_potential_no_implies_not_trivially_yes():
    pairs = [
        (OrbitSpectrum(cycles=GEO_EVEN), OrbitSpectrum(cycles=GEO_ODD)),
        (OrbitSpectrum(n_like=1, z_like=OMEGA), OrbitSpectrum(z_like=OMEGA)),
        (SIGMA, OrbitSpectrum(n_like=2)),
    ]
    for a, b in pairs:
        if potentially_conjugate(a, b).is_no:
            assert not trivially_conjugate(a, b).is_yes


def test_potentially_conjugate_component_count_obstruction():
    a = OrbitSpectrum(n_like=2)
    b = OrbitSpectrum(n_like=4)
    t = potentially_conjugate(a, b)
    assert t.is_no


# --- restriction -----------------------------------------------------------

def test_restrict_even_indices_of_powers_of_two():
    s = OrbitSpectrum(cycles=SequenceDescriptor((), GeometricTail(2, 2)))
    sel = OrbitSelector(prefix_indices=(), tail_start=0, tail_step=2)
    out = restrict_to_orbits(s, sel)
    assert out.cycles.tail == GeometricTail(2, 4)


def test_restrict_prefix_only_and_identity():
    s = OrbitSpectrum(cycles=SequenceDescriptor((4, 6), ConstantTail(9)))
    prefix_only = restrict_to_orbits(
        s, OrbitSelector(prefix_indices=(0, 1), tail_start=None, tail_step=None)
    )
    assert prefix_only.cycles == finite_descriptor([4, 6])
    everything = restrict_to_orbits(
        s, OrbitSelector(prefix_indices=(0, 1), tail_start=0, tail_step=1)
    )
    assert everything.cycles == s.cycles


def test_restrict_requires_pure_rotary():
    with pytest.raises(ValueError):
        restrict_to_orbits(SIGMA, OrbitSelector((), 0, 1))
