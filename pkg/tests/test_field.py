import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qlnc.field import FieldElement, Modulus, check_prime, inverse, is_prime, rank, rref, solve

PRIMES = [2, 3, 5, 7, 11, 13]


@pytest.mark.parametrize("d", [2, 3, 5, 7, 97])
def test_check_prime_accepts_primes(d):
    assert int(check_prime(d)) == d


@pytest.mark.parametrize("d", [0, 1, 4, 6, 9, 15, -3])
def test_check_prime_rejects_composites(d):
    with pytest.raises(ValueError):
        check_prime(d)


def test_is_prime_small_table():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


@pytest.mark.parametrize("a, d, want", [(1, 2, 1), (2, 5, 3), (3, 7, 5)])
def test_inverse_examples(a, d, want):
    assert inverse(a, d) == want


@pytest.mark.parametrize("d", [7])
def test_inverse_exhaustive(d):
    for a in range(1, d):
        assert a * inverse(a, d) % d == 1


def test_inverse_of_zero():
    with pytest.raises(ZeroDivisionError):
        inverse(0, 5)


@pytest.mark.parametrize("d", PRIMES)
def test_field_axioms_exhaustive(d):
    F = Modulus(d)
    els = [F(v) for v in range(d)]
    for a, b in itertools.product(els, repeat=2):
        assert a + b == b + a and a * b == b * a
        assert int(a + b) < d and int(a * b) < d
        if int(a):
            assert a.inverse().inverse() == a
    for a, b, c in itertools.product(els[: min(d, 5)], repeat=3):
        assert (a + b) + c == a + (b + c)
        assert a * (b + c) == a * b + a * c


def test_mixing_moduli_fails():
    with pytest.raises(ValueError):
        FieldElement(1, 3) + FieldElement(1, 5)


def _random_matrix(seed, d, rows=None, cols=None):
    rng = np.random.default_rng(seed)
    rows = rows or int(rng.integers(1, 6))
    cols = cols or int(rng.integers(1, 7))
    return rng.integers(0, d, size=(rows, cols))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([2, 3, 5, 7]))
def test_rref_is_reduced_and_row_equivalent(seed, d):
    A = _random_matrix(seed, d)
    R, piv = rref(A, d)
    assert rank(A, d) == len(piv)
    for i, c in enumerate(piv):
        assert R[i, c] == 1
        assert np.count_nonzero(R[:, c]) == 1
    assert not R[len(piv):].any()
    # same row space: stacking adds no rank
    assert rank(np.vstack([A, R]), d) == len(piv)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([2, 3, 5]))
def test_solve_returns_a_solution_when_consistent(seed, d):
    rng = np.random.default_rng(seed)
    A = _random_matrix(seed, d)
    x = rng.integers(0, d, size=A.shape[1])
    b = A @ x % d
    y = solve(A, b, d)
    assert y is not None
    assert np.array_equal(A @ y % d, b)


def test_solve_inconsistent_is_none():
    A = np.array([[1, 1], [1, 1]])
    assert solve(A, [0, 1], 2) is None


def test_rref_column_order_pivots_requested_column_first():
    A = np.array([[1, 1, 0], [0, 1, 1]])
    _, piv = rref(A, 2, column_order=[2, 0, 1])
    assert piv[0] == 2
