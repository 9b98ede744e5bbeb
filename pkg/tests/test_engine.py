"""Sentence evaluation on <P(n), rotate>: truth, symmetry, backends, budgets."""
import itertools
import random

import pytest

from finquo.core import Budget, BudgetExceededError
from finquo.fmcheck.engine import (
    FiniteDynSys,
    active_backend,
    compile_sentence,
    eval_sentence,
    necklace_reps,
)
from finquo.fmcheck.formulas import parse_formula

SWAP = "(exists x (and (not (= x 0)) (= (meet x (a x)) 0) (= (join x (a x)) 1)))"


def ev(text: str, n: int, **kw) -> bool:
    return eval_sentence(parse_formula(text), n, **kw)


# --- ground truth ----------------------------------------------------------

def test_swap_sentence_detects_even_cycles():
    # a complementary pair {x, a(x)} exists iff the cycle length is even
    for n in range(1, 9):
        assert ev(SWAP, n) == (n % 2 == 0), n


def test_alpha_order():
    for n in (2, 3, 5, 7):
        assert ev(f"(forall x (= (apow {n} x) x))", n)
        for k in range(1, n):
            assert not ev(f"(forall x (= (apow {k} x) x))", n), (n, k)


def test_alpha_inverse_cancels():
    for n in (1, 2, 5, 6):
        assert ev("(forall x (= (ainv (a x)) x))", n)
        assert ev("(forall x (= (a (ainv x)) x))", n)


def test_boolean_algebra_axioms():
    laws = [
        "(forall x (forall y (= (meet x y) (meet y x))))",
        "(forall x (forall y (= (join x y) (join y x))))",
        "(forall x (= (comp (comp x)) x))",
        "(forall x (= (meet x x) x))",
        "(forall x (= (join x (comp x)) 1))",
        "(forall x (= (meet x (comp x)) 0))",
        "(forall x (forall y (= (comp (meet x y)) (join (comp x) (comp y)))))",
        "(forall x (forall y (= (a (meet x y)) (meet (a x) (a y)))))",
        "(forall x (forall y (= (a (join x y)) (join (a x) (a y)))))",
        "(forall x (= (a (comp x)) (comp (a x))))",
        "(forall x (forall y (implies (le x y) (le (a x) (a y)))))",
    ]
    for n in range(1, 9):
        for law in laws:
            assert ev(law, n), (n, law)


def test_le_is_subset_order():
    assert ev("(forall x (le 0 x))", 4)
    assert ev("(forall x (le x 1))", 4)
    assert not ev("(forall x (le 1 x))", 4)
    assert ev("(forall x (forall y (le (meet x y) x)))", 5)


def test_atom_counting_sentences():
    # "there exist k pairwise disjoint nonzero sets" holds iff k <= n
    def k_disjoint(k: int) -> str:
        vs = [f"x{i}" for i in range(k)]
        atoms = [f"(not (= {v} 0))" for v in vs]
        atoms += [
            f"(= (meet {a} {b}) 0)" for a, b in itertools.combinations(vs, 2)
        ]
        body = "(and " + " ".join(atoms) + ")"
        for v in reversed(vs):
            body = f"(exists {v} {body})"
        return body

    for n in (1, 2, 3, 4):
        for k in (1, 2, 3, 4, 5):
            assert ev(k_disjoint(k), n) == (k <= n), (n, k)


# --- symmetry reduction ----------------------------------------------------

def test_necklace_reps_counts():
    # orbit counts of subsets of an n-cycle under rotation
    expected = {1: 2, 2: 3, 3: 4, 4: 6, 5: 8, 6: 14}
    for n, c in expected.items():
        assert len(necklace_reps(n)) == c


def _random_sentence(rng: random.Random, rank: int) -> str:
    vs = [f"v{i}" for i in range(rank)]

    def term(depth: int, avail):
        if depth == 0 or rng.random() < 0.3:
            return rng.choice(list(avail) + ["0", "1"])
        op = rng.choice(["meet", "join", "comp", "a", "ainv"])
        if op in ("meet", "join"):
            return f"({op} {term(depth - 1, avail)} {term(depth - 1, avail)})"
        return f"({op} {term(depth - 1, avail)})"

    def atom(avail):
        rel = rng.choice(["=", "le"])
        return f"({rel} {term(2, avail)} {term(2, avail)})"

    body = atom(vs)
    for extra in (atom(vs), atom(vs)):
        body = f"({rng.choice(['and', 'or', 'implies'])} {body} {extra})"
    for i, v in enumerate(reversed(vs)):
        q = "exists" if i % 2 == 0 else "forall"
        body = f"({q} {v} {body})"
    return body


def test_symmetry_matches_naive_sweep(rng):
    for _ in range(40):
        text = _random_sentence(rng, rng.choice([1, 2]))
        phi = parse_formula(text)
        for n in (2, 3, 5, 6):
            fast = eval_sentence(phi, n, symmetry=True)
            slow = eval_sentence(phi, n, symmetry=False)
            assert fast == slow, (text, n)


# --- backends --------------------------------------------------------------

def test_backend_agreement(rng):
    if active_backend() != "compiled":
        pytest.skip("compiled kernel unavailable")
    sentences = [SWAP, "(forall x (= (comp (comp x)) x))"] + [
        _random_sentence(rng, 2) for _ in range(15)
    ]
    for text in sentences:
        phi = compile_sentence(parse_formula(text))
        for n in (3, 5):
            a = eval_sentence(phi, n, backend="compiled")
            b = eval_sentence(phi, n, backend="python")
            assert a == b, (text, n)


def test_unknown_backend_rejected():
    with pytest.raises(ValueError, match="unknown backend"):
        ev("(= 0 0)", 3, backend="turbo")


# --- budgets ---------------------------------------------------------------

def test_universe_budget():
    with pytest.raises(BudgetExceededError):
        ev(SWAP, 20, budget=Budget(max_universe_bits=14))
    # within bits but over the step budget
    tight = Budget(max_universe_bits=14, max_steps=100)
    with pytest.raises(BudgetExceededError):
        ev(SWAP, 12, budget=tight)


def test_structure_helpers():
    sys = FiniteDynSys(4)
    assert sys.full == 0b1111
    assert sys.rotate(0b0001, 1) == 0b0010
    assert sys.rotate(0b1000, 1) == 0b0001
    assert sys.rotate(0b0110, 4) == 0b0110
    assert sys.mask_of([0, 2]) == 0b101
    with pytest.raises(ValueError):
        sys.mask_of([4])
    with pytest.raises(ValueError):
        FiniteDynSys(0)
