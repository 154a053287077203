from fractions import Fraction
from math import comb

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from marginodds.errors import DomainError
from marginodds.fnch import (
    FnchParams,
    fnch_log_pmf,
    fnch_log_pmf_logpsi,
    fnch_mean,
    fnch_pmf,
    fnch_support,
)


def _exact(params, psi=Fraction(1)):
    """Brute-force oracle with exact rational arithmetic."""
    lo, hi = fnch_support(params)
    w = {u: comb(params.n1, u) * comb(params.n2, params.m1 - u) * psi**u for u in range(lo, hi + 1)}
    total = sum(w.values())
    return {u: v / total for u, v in w.items()}


@st.composite
def margins(draw, max_n=40):
    n1 = draw(st.integers(0, max_n))
    n2 = draw(st.integers(0, max_n))
    m1 = draw(st.integers(0, n1 + n2))
    return FnchParams(n1, n2, m1)


def test_support_examples():
    assert fnch_support(FnchParams(8, 2, 8)) == (6, 8)
    assert fnch_support(FnchParams(3, 5, 2)) == (0, 2)
    assert fnch_support(FnchParams.from_table([7, 1, 1, 1])) == (6, 8)


def test_from_table():
    p = FnchParams.from_table([7, 1, 1, 1], psi=2.0)
    assert (p.n1, p.n2, p.m1, p.psi) == (8, 2, 8, 2.0)


@given(margins())
def test_central_case_matches_hypergeometric(params):
    u, pmf = fnch_pmf(params)
    exact = _exact(params)
    assert list(u) == list(exact)
    np.testing.assert_allclose(pmf, [float(exact[k]) for k in u], rtol=0, atol=1e-12)
    assert abs(pmf.sum() - 1) < 1e-12


@given(margins(), st.floats(1e-3, 1e3))
def test_normalization(params, psi):
    _, pmf = fnch_pmf(FnchParams(params.n1, params.n2, params.m1, psi))
    assert abs(pmf.sum() - 1) < 1e-12


def test_noncentral_exact():
    params = FnchParams(5, 4, 6, 3.0)
    u, pmf = fnch_pmf(params)
    exact = _exact(params, Fraction(3))
    np.testing.assert_allclose(pmf, [float(exact[k]) for k in u], atol=1e-13)


def test_extreme_psi_concentrates():
    params = FnchParams(8, 2, 8)
    lo, hi = fnch_support(params)
    assert np.exp(fnch_log_pmf(hi, params, 1e6)) > 0.999
    assert np.exp(fnch_log_pmf(lo, params, 1e-6)) > 0.999


def test_symmetry_under_inverse_odds():
    # swapping the columns maps a -> n1 - a and psi -> 1 / psi
    p = FnchParams(6, 5, 4)
    q = FnchParams(6, 5, 7)
    for a in range(*[fnch_support(p)[0], fnch_support(p)[1] + 1]):
        assert fnch_log_pmf(a, p, 2.5) == pytest.approx(fnch_log_pmf(6 - a, q, 0.4), abs=1e-12)


def test_mean_increases_with_psi():
    means = [fnch_mean(FnchParams(10, 7, 9, psi)) for psi in np.geomspace(0.01, 100, 25)]
    assert np.all(np.diff(means) > 0)


def test_vectorized_psi():
    params = FnchParams.from_table([7, 1, 1, 1])
    psi = np.array([0.5, 1.0, 4.0])
    v = fnch_log_pmf(7, params, psi)
    assert v.shape == (3,)
    for k, s in enumerate(psi):
        assert v[k] == pytest.approx(fnch_log_pmf(7, params, float(s)), abs=1e-14)
    np.testing.assert_allclose(fnch_log_pmf_logpsi(7, params, np.log(psi)), v, atol=1e-14)


def test_large_totals_no_overflow():
    params = FnchParams(10_000, 10_000, 10_000)
    u, pmf = fnch_pmf(params)
    assert np.all(np.isfinite(pmf)) and abs(pmf.sum() - 1) < 1e-12
    v = fnch_log_pmf(5000, params, np.array([1e-300, 1.0, 1e300]))
    assert np.all(np.isfinite(v))


def test_errors():
    params = FnchParams(8, 2, 8)
    with pytest.raises(DomainError):
        fnch_log_pmf(5, params)
    with pytest.raises(DomainError):
        fnch_log_pmf(7, params, 0.0)
    with pytest.raises(DomainError):
        fnch_log_pmf(7, params, -1.0)
    with pytest.raises(DomainError):
        FnchParams(2, 2, 5)
    with pytest.raises(DomainError):
        FnchParams(-1, 2, 0)
