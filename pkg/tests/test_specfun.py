"""Modified-Bessel backends against an in-test series oracle and each other."""

import math
import os

import numpy as np
import pytest

from ersraman import specfun
from ersraman.specfun import (
    BesselResult,
    available_backends,
    backend_name,
    bessel_i,
    bessel_i_result,
    i0,
    i0_2sqrt,
    i0e,
    i0sq_minus_i1sq,
    i0sq_minus_i1sq_2sqrt,
    i1,
    i1e,
    phi1,
)

# reference values frozen from the Maclaurin series summed in exact rational
# arithmetic (fractions.Fraction, 80 terms) and rounded once to double
I0_AT_1 = 1.2660658777520084
I1_AT_2 = 1.5906368546373291
I0_AT_2 = 2.2795853023360673


def series_i(order: int, x: float) -> float:
    """Independent Maclaurin evaluation; one multiply per term, fsum at the end.

    Every term is positive so there is no cancellation; 90 terms put the
    truncation tail far below double precision for x <= 40.
    """
    half = 0.5 * x
    term = 1.0 if order == 0 else half
    terms = [term]
    for k in range(1, 90):
        term *= half * half / (k * (k + order))
        terms.append(term)
    return math.fsum(terms)


@pytest.fixture(params=sorted(available_backends()))
def backend(request):
    return available_backends()[request.param]


def test_series_oracle_small_and_large(backend):
    for x in np.concatenate([np.linspace(0.0, 10.0, 41), np.linspace(10.5, 30.0, 40)]):
        ref0, ref1 = series_i(0, float(x)), series_i(1, float(x))
        assert backend.i0(np.array([x]))[0] == pytest.approx(ref0, rel=5e-14)
        assert backend.i1(np.array([x]))[0] == pytest.approx(ref1, rel=5e-14)


def test_frozen_values():
    assert i0(1.0) == pytest.approx(I0_AT_1, rel=1e-13)
    assert i1(2.0) == pytest.approx(I1_AT_2, rel=1e-13)
    assert i0(2.0) == pytest.approx(I0_AT_2, rel=1e-13)
    assert i0(0.0) == 1.0
    assert i1(0.0) == 0.0


def test_scaled_unscaled_consistency():
    x = np.linspace(0.0, 30.0, 301)
    ex = np.exp(x)
    np.testing.assert_allclose(i0e(x) * ex, i0(x), rtol=1e-12)
    np.testing.assert_allclose(i1e(x) * ex, i1(x), rtol=1e-12)


def test_scaled_stays_finite_far_past_overflow():
    for x in (7.75, 100.0, 1e4, 1e6):
        assert 0.0 < i0e(x) < 1.0
        assert 0.0 < i1e(x) < i0e(x)
    # the unscaled value genuinely exceeds the double range out here
    assert math.isinf(i0(800.0))
    assert i0e(800.0) == pytest.approx(1.0 / math.sqrt(2.0 * math.pi * 800.0), rel=1e-3)


def test_regime_handoff_is_smooth(backend):
    # the series/Chebyshev switch sits at X_CUT; the oracle spans it
    cut = specfun.X_CUT
    x = np.linspace(cut - 0.2, cut + 0.2, 81)
    ref = np.array([series_i(0, float(v)) for v in x])
    np.testing.assert_allclose(backend.i0(x), ref, rtol=5e-14)
    lo, hi = cut - 1e-12, cut + 1e-12
    assert abs(i0(hi) - i0(lo)) <= 1e-11 * i0(cut)
    assert abs(i1(hi) - i1(lo)) <= 1e-11 * i0(cut)


def test_scaled_derivative_recurrence():
    # d/dx i1e = i0e - i1e - i1e / x, checked by central differences
    h = 1e-6
    for x in np.linspace(0.1, 50.0, 25):
        fd = (i1e(x + h) - i1e(x - h)) / (2.0 * h)
        assert fd == pytest.approx(i0e(x) - i1e(x) - i1e(x) / x, abs=1e-9)


def test_difference_group_matches_direct_form():
    x = np.linspace(0.0, 20.0, 201)
    np.testing.assert_allclose(i0sq_minus_i1sq(x), i0(x) ** 2 - i1(x) ** 2, rtol=1e-12)
    assert i0sq_minus_i1sq(0.0) == 1.0


def test_difference_group_positive_and_free_of_cancellation():
    # the direct form loses all digits near x ~ 300; the grouped one must not
    x = np.linspace(0.0, 300.0, 121)
    vals = i0sq_minus_i1sq(x)
    assert np.all(vals > 0.0)
    assert np.all(np.isfinite(vals))
    scaled = i0e(x) ** 2 - i1e(x) ** 2
    np.testing.assert_allclose(vals * np.exp(-2.0 * x), scaled, rtol=5e-11)
    # exp(-2x) (I0^2 - I1^2) decreases monotonically
    assert np.all(np.diff(scaled) < 0.0)


def test_sqrt_argument_wrappers():
    q = np.linspace(0.0, 50.0, 101)
    np.testing.assert_allclose(i0_2sqrt(q), i0(2.0 * np.sqrt(q)), rtol=1e-13)
    np.testing.assert_allclose(
        i0sq_minus_i1sq_2sqrt(q), i0sq_minus_i1sq(2.0 * np.sqrt(q)), rtol=1e-13
    )
    pos = q[q > 0.0]
    np.testing.assert_allclose(
        phi1(pos), i1(2.0 * np.sqrt(pos)) / np.sqrt(pos), rtol=1e-13
    )
    assert phi1(0.0) == 1.0
    # entire-function series 1 + q/2 + q^2/12 near zero
    assert phi1(1e-4) == pytest.approx(1.0 + 5e-5 + 1e-8 / 12.0, rel=1e-12)


def test_backend_parity():
    backends = available_backends()
    if len(backends) < 2:
        pytest.skip("compiled backend not built")
    py, cy = backends["python"], backends["compiled"]
    x = np.linspace(0.0, 300.0, 601)
    big = np.array([1e3, 1e4, 1e5, 1e6])
    for name in ("i0", "i1"):
        np.testing.assert_allclose(
            getattr(cy, name)(x[x <= 700]), getattr(py, name)(x[x <= 700]), rtol=2e-13
        )
    for name in ("i0e", "i1e"):
        np.testing.assert_allclose(
            getattr(cy, name)(np.concatenate([x, big])),
            getattr(py, name)(np.concatenate([x, big])),
            rtol=2e-13,
        )
    q = np.linspace(0.0, 90.0, 301)
    for name in ("i0_2sqrt", "phi1", "i0sq_minus_i1sq_2sqrt"):
        np.testing.assert_allclose(getattr(cy, name)(q), getattr(py, name)(q), rtol=2e-13)
    np.testing.assert_allclose(cy.i0sq_minus_i1sq(x), py.i0sq_minus_i1sq(x), rtol=2e-13)


def test_backend_selection_reporting():
    name = backend_name()
    assert name in ("python", "compiled")
    if os.environ.get("ERSRAMAN_PURE_PYTHON", "") not in ("", "0"):
        assert name == "python"


def test_argument_validation():
    for bad in (-1.0, math.nan, math.inf):
        with pytest.raises(ValueError):
            i0(bad)
        with pytest.raises(ValueError):
            phi1(bad)
    with pytest.raises(ValueError):
        bessel_i(2, 1.0)
    with pytest.raises(ValueError):
        i1(np.array([0.5, -0.5]))


def test_bessel_i_dispatch_and_result_wrapper():
    assert bessel_i(0, 1.0) == i0(1.0)
    assert bessel_i(1, 2.0, scaled=True) == i1e(2.0)
    res = bessel_i_result(0, 1.0)
    assert res == BesselResult(value=i0(1.0), scaled=False)
    assert bessel_i_result(1, 2.0, scaled=True).scaled
    with pytest.raises(ValueError):
        BesselResult(value=math.inf, scaled=True)
    with pytest.raises(ValueError):
        BesselResult(value=-0.5, scaled=False)
    # unscaled overflow is representable as a result, scaled is not
    assert BesselResult(value=math.inf, scaled=False).value == math.inf
