"""Bessel J1: high-precision series oracle, roots, and accuracy contract."""

from decimal import Decimal, getcontext

import numpy as np
import pytest
import scipy.special

from rhodyn.special import bessel_j1, bessel_j1_zeros

getcontext().prec = 50


def j1_decimal(x: Decimal, terms: int = 80) -> Decimal:
    """Reference ascending series in 50-digit arithmetic."""
    half = x / 2
    z = half * half
    term = half
    total = term
    for k in range(1, terms):
        term = -term * z / (k * (k + 1))
        total += term
    return total


def j1_root_decimal(lo: Decimal, hi: Decimal, iters: int = 200) -> Decimal:
    """Bisection on the 50-digit series."""
    flo = j1_decimal(lo)
    for _ in range(iters):
        mid = (lo + hi) / 2
        fmid = j1_decimal(mid)
        if (flo < 0) == (fmid < 0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return (lo + hi) / 2


def test_j1_at_zero():
    assert bessel_j1(0.0) == 0.0


def test_j1_odd_symmetry():
    xs = np.array([0.3, 2.0, 7.7, 12.0, 31.0])
    assert np.allclose(bessel_j1(-xs), -bessel_j1(xs), rtol=0, atol=1e-14)


def test_j1_of_one_against_decimal_series():
    ref = float(j1_decimal(Decimal(1)))
    assert abs(bessel_j1(1.0) - ref) < 1e-9
    # known to many digits from the oracle itself
    assert abs(ref - 0.44005058574493355) < 1e-15


def test_first_root_from_decimal_oracle():
    root = float(j1_root_decimal(Decimal("3.7"), Decimal("3.9")))
    assert abs(root - 3.8317059702075123) < 1e-12
    assert abs(bessel_j1(root)) < 1e-9


@pytest.mark.parametrize("region", ["series", "recurrence", "asymptotic"])
def test_accuracy_against_scipy(region):
    xs = {"series": np.linspace(1e-3, 9.0, 1500),
          "recurrence": np.linspace(9.0001, 24.9999, 1500),
          "asymptotic": np.linspace(25.0, 500.0, 1500)}[region]
    err = np.abs(bessel_j1(xs) - scipy.special.jv(1, xs))
    assert err.max() < 1e-12


def test_rejects_non_finite():
    with pytest.raises(ValueError):
        bessel_j1(np.inf)


def test_zeros_match_scipy_and_spacing():
    zeros = bessel_j1_zeros(8)
    assert np.abs(zeros - scipy.special.jn_zeros(1, 8)).max() < 1e-10
    spacing = np.diff(zeros)
    # spacing approaches pi from above
    assert (spacing > np.pi - 1e-3).all()
    assert abs(spacing[-1] - np.pi) < 0.01


def test_zeros_count_validation():
    with pytest.raises(ValueError):
        bessel_j1_zeros(0)
