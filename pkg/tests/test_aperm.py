"""Window maps, orbit classification, index and parity, direct sums."""
import random

import pytest

from finquo.aperm import (
    Censored,
    FiniteCycle,
    FinitePath,
    OrbitSpectrum,
    WindowMap,
    almost_equal,
    classify_orbits,
    compose,
    direct_sum,
    index,
    inverse,
    parity,
    rotary_window,
    separating_set,
    shift_spectrum,
    shift_window,
    spectrum_of_window,
    window_index_report,
)
from finquo.core import OMEGA, CensoredOrbitError
from finquo.descriptors import ConstantTail, SequenceDescriptor, finite_descriptor

from conftest import random_interior_map


# --- window map algebra ----------------------------------------------------

def test_compose_direct_unfolding():
    f = WindowMap(3, ((0, 1), (1, 2)))
    g = WindowMap(3, ((1, 0),))
    assert compose(f, g).pairs == ((0, 0),)


def test_identity_is_a_unit():
    ident = WindowMap(10, tuple((i, i) for i in range(10)))
    g = WindowMap(10, ((0, 3), (4, 1), (7, 7)))
    assert compose(ident, g) == g
    assert compose(g, ident) == g


def test_compose_matches_pointwise_oracle(rng):
    for _ in range(100):
        f = random_interior_map(rng, 8)
        g = random_interior_map(rng, 8)
        h = compose(f, g)
        for i in range(8):
            fi = f.apply(i)
            want = g.apply(fi) if fi is not None else None
            assert h.apply(i) == want, (f.pairs, g.pairs, i)


def test_compose_size_mismatch():
    with pytest.raises(ValueError):
        compose(WindowMap(3, ()), WindowMap(4, ()))


def test_inverse_transposes_and_is_involutive(rng):
    f = WindowMap(4, ((0, 1), (1, 2)))
    assert inverse(f).pairs == ((1, 0), (2, 1))
    for _ in range(50):
        g = random_interior_map(rng, 12)
        assert inverse(inverse(g)) == g
        # g^-1 after g is the identity on dom(g)
        ident_on_dom = compose(g, inverse(g))
        assert ident_on_dom.pairs == tuple((i, i) for i in sorted(g.domain()))


def test_window_map_validation():
    with pytest.raises(ValueError):
        WindowMap(3, ((0, 1), (0, 2)))  # repeated source
    with pytest.raises(ValueError):
        WindowMap(3, ((0, 1), (2, 1)))  # repeated target
    with pytest.raises(ValueError):
        WindowMap(3, ((0, 3),))  # out of window
    with pytest.raises(ValueError):
        WindowMap(0, ())


# --- almost_equal / separating sets ----------------------------------------

def test_almost_equal_thresholds():
    f = WindowMap(9, tuple((i, i) for i in range(6)))
    g = WindowMap(9, tuple((i, i + 6) for i in range(3)) + ((3, 3), (4, 4), (5, 5)))
    assert almost_equal(f, f, 0)
    assert not almost_equal(f, g, 2)
    assert almost_equal(f, g, 3)


def test_separating_set_successor_vs_identity():
    n = 10
    succ = WindowMap(n, tuple((i, i + 1) for i in range(n - 1)))
    ident = WindowMap(n, tuple((i, i) for i in range(n)))
    b = separating_set(succ, ident)
    bset = set(b)
    assert bset
    assert not {i + 1 for i in bset} & bset
    assert 3 * len(b) >= len(set(range(n - 1)))


def test_separating_set_singleton_disagreement():
    f = WindowMap(5, ((2, 3),))
    g = WindowMap(5, ((2, 4),))
    assert separating_set(f, g) == (2,)


def test_separating_set_random_postcondition(rng):
    for _ in range(60):
        n = 50
        dom = rng.sample(range(n), 30)
        f = WindowMap(n, tuple(zip(dom, rng.sample(range(n), 30))))
        g = WindowMap(n, tuple(zip(dom, rng.sample(range(n), 30))))
        fd, gd = f.as_dict, g.as_dict
        disagreement = [i for i in dom if fd[i] != gd[i]]
        b = separating_set(f, g)
        assert {fd[i] for i in b}.isdisjoint({gd[i] for i in b})
        assert 3 * len(b) >= len(disagreement)


# --- orbit classification --------------------------------------------------

def test_classify_cycle_path_singleton_and_censor():
    f = WindowMap(6, ((0, 1), (1, 0), (3, 4), (4, 5)))
    kinds = dict(classify_orbits(f))
    assert kinds[(1, 0)] == FiniteCycle(2)
    # isolated point outside dom and ran: a deletable length-1 path
    assert kinds[(2,)] == FinitePath(1)
    # the 3->4->5 trace stops on the window edge, so its future is unknown
    assert kinds[(3, 4, 5)] == Censored(forward_escape=True, backward_escape=False)


def test_classify_interior_path_is_a_path():
    f = WindowMap(8, ((2, 3), (3, 4)))
    kinds = dict(classify_orbits(f))
    assert kinds[(2, 3, 4)] == FinitePath(3)


def test_classify_fixed_point_is_a_one_cycle():
    f = WindowMap(5, ((2, 2),))
    kinds = dict(classify_orbits(f))
    assert kinds[(2,)] == FiniteCycle(1)


def test_classify_successor_censored_both_sides():
    succ = WindowMap(8, tuple((i, i + 1) for i in range(7)))
    orbits = classify_orbits(succ)
    assert len(orbits) == 1
    assert orbits[0][1] == Censored(forward_escape=True, backward_escape=True)


def test_classify_is_a_partition(rng):
    for _ in range(50):
        f = random_interior_map(rng, 16)
        orbits = classify_orbits(f)
        seen = [p for pts, _ in orbits for p in pts]
        assert sorted(seen) == list(range(16))


def test_rotary_window_traces_to_its_lengths():
    f = rotary_window([3, 4, 5])
    spec, censored = spectrum_of_window(f)
    assert censored == 0
    assert spec.cycles == finite_descriptor([3, 4, 5])
    assert spec.finite_paths == ()


def test_margin_widens_the_censor_band():
    f = WindowMap(10, ((2, 3), (3, 4)))
    assert dict(classify_orbits(f, margin=1))[(2, 3, 4)] == FinitePath(3)
    assert dict(classify_orbits(f, margin=3))[(2, 3, 4)] == Censored(False, True)
    assert dict(classify_orbits(f, margin=6))[(2, 3, 4)] == Censored(True, True)
    with pytest.raises(ValueError):
        classify_orbits(f, margin=0)


# --- index and parity ------------------------------------------------------

def test_spectrum_index_examples():
    assert index(OrbitSpectrum(n_like=1)) == 1
    assert index(OrbitSpectrum(rev_n_like=1)) == -1
    assert index(OrbitSpectrum(n_like=2, rev_n_like=2, z_like=5)) == 0
    assert parity(OrbitSpectrum(n_like=1)) == 1
    assert parity(OrbitSpectrum(n_like=2)) == 0


def test_index_of_inverse_spectrum():
    s = OrbitSpectrum(n_like=3, rev_n_like=1)
    flipped = OrbitSpectrum(n_like=s.rev_n_like, rev_n_like=s.n_like)
    assert index(flipped) == -index(s)
    assert parity(flipped) == parity(s)


def test_window_index_refuses_censored_orbits():
    succ = shift_window(8, 0, 8, 1)
    with pytest.raises(CensoredOrbitError):
        index(succ)
    report = window_index_report(succ)
    assert report.two_sided_escaping == 1
    assert report.apparent_index == 0


def test_interior_window_index_is_zero(rng):
    for _ in range(50):
        f = random_interior_map(rng, 20)
        assert index(f) == 0


def test_shift_window_apparent_index_additivity():
    # one-sided escape surrogates behave like the symbolic index
    n = 40
    f = shift_window(n, 10, n, 2)
    g = shift_window(n, 10, n, 3)
    h = compose(f, g)
    margin = 6
    rf = window_index_report(f, margin)
    rg = window_index_report(g, margin)
    rh = window_index_report(h, margin)
    assert (rf.apparent_index, rg.apparent_index) == (2, 3)
    assert rh.apparent_index == rf.apparent_index + rg.apparent_index


def test_index_invariant_under_interior_deletion(rng):
    # splitting an orbit at an interior point never changes the evidence
    n = 40
    f = shift_window(n, 4, n, 2)
    margin = 4
    base = window_index_report(f, margin).apparent_index
    for _ in range(20):
        victims = rng.sample([i for i, _ in f.pairs if margin <= i < n - margin], 3)
        g = WindowMap(n, tuple(p for p in f.pairs if p[0] not in victims))
        assert window_index_report(g, margin).apparent_index == base


# --- spectra and direct sums -----------------------------------------------

def test_spectrum_of_window_mixed():
    pairs = ((1, 2), (2, 1)) + tuple((i, i + 1) for i in range(4, 8))
    f = WindowMap(9, pairs)
    spec, censored = spectrum_of_window(f)
    assert spec.cycles == finite_descriptor([2])
    # isolated 0 and 3 are defect paths; only the chain into the edge escapes
    assert spec.finite_paths == (1, 1)
    assert censored == 1


def test_direct_sum_counts_and_absorption():
    s = shift_spectrum(1)
    assert direct_sum(s, s).n_like == 2
    empty = OrbitSpectrum()
    assert direct_sum(s, empty) == s
    a = OrbitSpectrum(z_like=3)
    b = OrbitSpectrum(z_like=OMEGA)
    assert direct_sum(a, b).z_like is OMEGA


def test_direct_sum_commutes_and_associates():
    a = OrbitSpectrum(cycles=finite_descriptor([2, 2]), n_like=1)
    b = OrbitSpectrum(cycles=finite_descriptor([3]), rev_n_like=2)
    c = OrbitSpectrum(cycles=SequenceDescriptor((), ConstantTail(5)), z_like=1)
    assert direct_sum(a, b) == direct_sum(b, a)
    assert direct_sum(direct_sum(a, b), c) == direct_sum(a, direct_sum(b, c))


def test_shift_spectrum_signs():
    assert shift_spectrum(3) == OrbitSpectrum(n_like=3)
    assert shift_spectrum(-2) == OrbitSpectrum(rev_n_like=2)
    assert shift_spectrum(0) == OrbitSpectrum()


def test_spectrum_validation():
    with pytest.raises(ValueError):
        OrbitSpectrum(n_like=-1)
    with pytest.raises(ValueError):
        OrbitSpectrum(finite_paths=(0,))
