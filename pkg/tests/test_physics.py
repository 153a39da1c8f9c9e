import math

import numpy as np
import pytest

from rischannel.errors import DomainError, SingularGeometryError
from rischannel.physics import (
    DipoleParams,
    green_function,
    green_matrix,
    green_row,
    inverse_polarizability,
    wavenumber,
)


def test_wavenumber():
    assert wavenumber(1.0) == pytest.approx(2 * math.pi * 1e9 / 299792458.0, rel=1e-15)
    with pytest.raises(DomainError):
        wavenumber(0.0)


def test_inverse_polarizability_at_resonance():
    d = DipoleParams(0.0, 0.0, 2.4, 0.7, 0.3)
    v = inverse_polarizability(2.4, d)
    assert v.real == 0.0
    assert v.imag == pytest.approx(0.3 / (0.7 * 2.4), rel=1e-15)


def test_inverse_polarizability_lossless():
    d = DipoleParams(0.0, 0.0, 2.4, 1.3, 0.0)
    v = inverse_polarizability(3.0, d)
    assert v.imag == 0.0
    assert v.real == pytest.approx((2.4**2 - 9.0) / (1.3 * 9.0), rel=1e-15)


def test_inverse_polarizability_double_frequency():
    d = DipoleParams(0.0, 0.0, 1.5, 1.0, 0.0)
    assert inverse_polarizability(3.0, d) == complex(-0.75, 0.0)


def test_inverse_polarizability_domain():
    d = DipoleParams(0.0, 0.0, 1.5, 1.0, 0.0)
    for f in (0.0, -1.0, float("nan")):
        with pytest.raises(DomainError):
            inverse_polarizability(f, d)


def test_real_part_changes_sign_once():
    d = DipoleParams(0.0, 0.0, 2.45, 1.0, 0.2)
    signs = np.sign([inverse_polarizability(f, d).real for f in np.linspace(2.0, 3.0, 101)])
    assert np.count_nonzero(np.diff(signs[signs != 0])) == 1


@pytest.mark.parametrize("kd, expected", [
    (1.0, complex(-0.02206424105391924, 0.19129942163949165)),
    (2.0, complex(-0.1275939181624363, 0.05597269478530892)),
])
def test_green_values(kd, expected):
    k = wavenumber(2.45)
    assert abs(green_function((0.0, 0.0), (kd / k, 0.0), k) - expected) < 1e-12


def test_green_symmetry_bit_exact():
    rng = np.random.default_rng(0)
    for _ in range(100):
        a, b = rng.uniform(-1, 1, 2), rng.uniform(-1, 1, 2)
        k = rng.uniform(1, 100)
        assert green_function(a, b, k) == green_function(b, a, k)


def test_green_coincident_raises():
    with pytest.raises(SingularGeometryError):
        green_function((0.1, 0.2), (0.1, 0.2), 10.0)


def test_far_field_decay():
    rng = np.random.default_rng(1)
    for _ in range(100):
        k = rng.uniform(1.0, 100.0)
        d = rng.uniform(3.0, 50.0) / k
        assert abs(green_function((0, 0), (2 * d, 0), k)) < abs(green_function((0, 0), (d, 0), k))


def test_green_matrix_matches_scalar_and_is_symmetric():
    rng = np.random.default_rng(2)
    pos = rng.uniform(0, 1, (12, 2))
    k = wavenumber(2.45)
    g = green_matrix(pos, k)
    assert np.array_equal(g, g.T)
    assert np.all(np.diag(g) == 0)
    for i in range(12):
        for j in range(12):
            if i != j:
                ref = green_function(pos[i], pos[j], k)
                assert abs(g[i, j] - ref) <= 1e-15 * abs(ref) + 1e-16
    row = green_row(pos[0], pos[1:], k)
    np.testing.assert_allclose(row, g[0, 1:], rtol=1e-15)


def test_green_matrix_rejects_duplicates():
    with pytest.raises(SingularGeometryError):
        green_matrix(np.array([[0.0, 0.0], [1.0, 1.0], [0.0, 0.0]]), 10.0)
