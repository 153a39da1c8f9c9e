import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import j0_series, y0_series
from rischannel.errors import DomainError
from rischannel.specfun import _hankel0_array, bessel_j0, bessel_y0, hankel0_first_kind

# frozen from the power-series oracle
J0_1, J0_2 = 0.7651976865579666, 0.22389077914123567
Y0_1, Y0_2 = 0.08825696421567697, 0.5103756726497451


def test_j0_at_zero():
    assert bessel_j0(0.0) == 1.0


@pytest.mark.parametrize("x, expected", [(1.0, J0_1), (2.0, J0_2)])
def test_j0_values(x, expected):
    assert abs(bessel_j0(x) - expected) < 1e-12


@pytest.mark.parametrize("x, expected", [(1.0, Y0_1), (2.0, Y0_2)])
def test_y0_values(x, expected):
    assert abs(bessel_y0(x) - expected) < 1e-12


def test_y0_diverges_at_origin():
    xs = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6]
    vals = [bessel_y0(x) for x in xs]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    # logarithmic envelope (2/pi) ln x
    assert abs(vals[-1] - (2 / math.pi) * math.log(1e-6)) < 1.0


@pytest.mark.parametrize("x", [1.0, 2.0, 0.37, 5.0, 5.0001, 17.3, 99.0])
def test_hankel_is_composition(x):
    h = hankel0_first_kind(x)
    assert h.real == bessel_j0(x)
    assert h.imag == bessel_y0(x)


def test_hankel_values():
    assert abs(hankel0_first_kind(1.0) - complex(J0_1, Y0_1)) < 1e-12
    assert abs(hankel0_first_kind(2.0) - complex(J0_2, Y0_2)) < 1e-12


@pytest.mark.parametrize("bad", [-1.0, float("nan"), float("inf"), -1e-300])
def test_j0_domain(bad):
    with pytest.raises(DomainError):
        bessel_j0(bad)


@pytest.mark.parametrize("bad", [0.0, -2.0, float("nan")])
def test_y0_domain(bad):
    with pytest.raises(DomainError):
        bessel_y0(bad)
    with pytest.raises(DomainError):
        hankel0_first_kind(bad)


def test_agrees_with_series_up_to_10():
    for x in np.linspace(0.0, 10.0, 401):
        assert abs(bessel_j0(x) - j0_series(x)) < 1e-10
        if x > 0:
            assert abs(bessel_y0(x) - y0_series(x)) < 1e-10


def test_j0_bounded_and_hankel_envelope_decreasing():
    xs = np.linspace(1e-3, 100.0, 3000)
    assert all(abs(bessel_j0(x)) <= 1.0 for x in xs)
    mags = [abs(hankel0_first_kind(x)) for x in xs if x >= 2.0]
    assert all(b < a for a, b in zip(mags, mags[1:]))
    for x in (20.0, 50.0, 100.0):
        assert abs(abs(hankel0_first_kind(x)) - math.sqrt(2 / (math.pi * x))) < 1e-2 / x


@pytest.mark.parametrize("x", [0.5, 1.0, 3.3, 4.99, 5.01, 8.0, 12.5, 40.0, 90.0])
def test_wronskian(x):
    h = 1e-6
    dj = (bessel_j0(x + h) - bessel_j0(x - h)) / (2 * h)
    dy = (bessel_y0(x + h) - bessel_y0(x - h)) / (2 * h)
    assert abs(bessel_j0(x) * dy - dj * bessel_y0(x) - 2 / (math.pi * x)) < 1e-5


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=1e-6, max_value=100.0))
def test_array_kernel_matches_scalar(x):
    arr = _hankel0_array(np.array([x]))[0]
    ref = hankel0_first_kind(x)
    assert abs(arr - ref) <= 1e-15 * max(1.0, abs(ref))


def test_array_kernel_rejects_bad_input():
    with pytest.raises(DomainError):
        _hankel0_array(np.array([1.0, 0.0]))
