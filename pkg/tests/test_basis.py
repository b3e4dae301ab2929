import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import power_sum, vandermonde_rows
from parcur.basis import column_fit_eval, vandermonde
from parcur.exceptions import ConditioningWarning, DataError, DuplicateParameterWarning
from parcur.linalg import numerical_rank, ols_solve


def test_vandermonde_small_example():
    V = vandermonde([-1.0, 0.0, 1.0], 3).V
    np.testing.assert_array_equal(V, [[1, -1, 1], [1, 0, 0], [1, 1, 1]])


def test_vandermonde_single_column():
    b = vandermonde([0.3, 0.5], 1)
    np.testing.assert_array_equal(b.V, [[1.0], [1.0]])
    assert b.degree == 1 and b.kind == "monomial"


def test_vandermonde_columns_are_powers():
    s = np.linspace(-1, 1, 9)
    np.testing.assert_allclose(vandermonde(s, 6).V, vandermonde_rows(s, 6), rtol=1e-15)


def test_vandermonde_guards():
    with pytest.raises(DataError):
        vandermonde([0.0, 1.0], 3)
    with pytest.raises(DataError):
        vandermonde(np.linspace(-1, 1, 20), 16)
    with pytest.warns(ConditioningWarning):
        vandermonde(np.linspace(-1, 1, 20), 13)
    with pytest.warns(DuplicateParameterWarning):
        vandermonde([0.0, 0.0, 1.0], 2)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        vandermonde(np.linspace(-1, 1, 20), 12)


def test_condition_number_reported():
    b = vandermonde(np.sort(np.random.default_rng(0).uniform(-1, 1, 21)), 5)
    assert b.V.shape == (21, 5)
    assert 1.0 < b.cond < 1e6


@pytest.mark.parametrize("n", range(2, 13))
def test_square_basis_full_rank(n):
    s = np.sort(np.random.default_rng(n).uniform(-1, 1, n))
    assert numerical_rank(vandermonde(s, n).V) == n


def test_column_fit_eval_examples():
    np.testing.assert_allclose(column_fit_eval([1.0, 2.0], [0.0, 1.0]), [1.0, 3.0])
    s = np.linspace(-1, 1, 7)
    np.testing.assert_array_equal(column_fit_eval([0.0, 1.0, 0.0], s), s)


def test_column_fit_eval_matches_power_sum():
    rng = np.random.default_rng(5)
    a = rng.uniform(-1, 1, 5)
    s = rng.uniform(-1, 1, 50)
    np.testing.assert_allclose(column_fit_eval(a, s), power_sum(a, s), rtol=0, atol=1e-13)
    A = rng.uniform(-1, 1, (5, 3))
    np.testing.assert_allclose(column_fit_eval(A, s)[:, 2], power_sum(A[:, 2], s), atol=1e-13)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 12), st.integers(0, 10_000))
def test_fit_reproduces_exact_polynomials(r, seed):
    rng = np.random.default_rng(seed)
    s = np.sort(rng.uniform(-1, 1, 40))
    a = rng.uniform(-1, 1, r)
    x = power_sum(a, s)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        coef = ols_solve(vandermonde(s, r).V, x)
    fit = column_fit_eval(coef, s)
    assert np.linalg.norm(fit - x) <= 1e-10 * max(np.linalg.norm(x), 1e-300)


def test_nested_fits_never_increase_residual():
    rng = np.random.default_rng(6)
    s = np.sort(rng.uniform(-1, 1, 60))
    x = np.sin(3 * s) + 0.1 * rng.normal(size=60)
    res = []
    for r in range(1, 13):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            V = vandermonde(s, r).V
        res.append(np.linalg.norm(V @ ols_solve(V, x) - x))
    assert all(b <= a + 1e-12 for a, b in zip(res, res[1:]))
