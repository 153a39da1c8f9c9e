"""Dipole model: Lorentzian inverse polarizability and the 2D Green's function.

Conventions (e^{-j omega t}):

    1/alpha(f) = (f_res**2 - f**2) / (chi * f**2) + 1j * gamma / (chi * f)
    G(r_i, r_j) = (1j / 4) * H0^(1)(k * |r_i - r_j|)

Frequencies are in GHz; positions in meters.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import specfun
from .errors import DomainError, SingularGeometryError

C0 = 299_792_458.0  # m/s


@dataclass(frozen=True)
class DipoleParams:
    """Position and Lorentzian resonance parameters of one dipole."""

    x: float
    y: float
    f_res: float  # GHz
    chi: float
    gamma: float  # GHz

    @property
    def position(self):
        return (self.x, self.y)


def wavenumber(f_ghz):
    """Free-space wavenumber k = 2*pi*f/c0 in rad/m for ``f_ghz`` in GHz."""
    f_ghz = float(f_ghz)
    if not (math.isfinite(f_ghz) and f_ghz > 0.0):
        raise DomainError(f"frequency must be finite and > 0, got {f_ghz}")
    return 2.0 * math.pi * f_ghz * 1e9 / C0


def inverse_polarizability(f, d):
    """Inverse Lorentzian polarizability of dipole ``d`` at ``f`` GHz."""
    f = float(f)
    if not (math.isfinite(f) and f > 0.0):
        raise DomainError(f"frequency must be finite and > 0, got {f}")
    f2 = f * f
    return complex((d.f_res * d.f_res - f2) / (d.chi * f2), d.gamma / (d.chi * f))


def _distance(r_i, r_j):
    return math.hypot(r_i[0] - r_j[0], r_i[1] - r_j[1])


def green_function(r_i, r_j, k):
    """Free-space 2D scalar Green's function between two distinct positions."""
    if not k > 0.0:
        raise DomainError(f"wavenumber must be > 0, got {k}")
    d = _distance(r_i, r_j)
    if d == 0.0:
        raise SingularGeometryError(f"coincident positions {tuple(r_i)}")
    return 0.25j * specfun.hankel0_first_kind(k * d)


def green_matrix(positions, k):
    """Pairwise Green's functions for an (n, 2) array of positions.

    Returns a symmetric (n, n) complex array with a zero diagonal. Each
    unordered pair is evaluated once and mirrored, so symmetry is exact.
    """
    positions = np.asarray(positions, dtype=np.float64)
    n = positions.shape[0]
    out = np.zeros((n, n), dtype=np.complex128)
    if n < 2:
        return out
    iu, ju = np.triu_indices(n, k=1)
    d = np.hypot(positions[iu, 0] - positions[ju, 0], positions[iu, 1] - positions[ju, 1])
    if np.any(d == 0.0):
        bad = int(np.flatnonzero(d == 0.0)[0])
        raise SingularGeometryError(
            f"dipoles {iu[bad]} and {ju[bad]} share position {tuple(positions[iu[bad]])}"
        )
    g = 0.25j * specfun._hankel0_array(k * d)
    out[iu, ju] = g
    out[ju, iu] = g
    return out


def green_row(position, others, k):
    """Green's functions between one position and each row of ``others``."""
    others = np.asarray(others, dtype=np.float64).reshape(-1, 2)
    d = np.hypot(others[:, 0] - position[0], others[:, 1] - position[1])
    if np.any(d == 0.0):
        raise SingularGeometryError(f"position {tuple(position)} coincides with another dipole")
    return 0.25j * specfun._hankel0_array(k * d)
