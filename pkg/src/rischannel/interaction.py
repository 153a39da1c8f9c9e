"""Interaction matrix assembly and RIS diagonal updates.

W[i, i] is the inverse polarizability of dipole i and W[i, j] = -G_ij for
i != j, in the canonical order of :class:`~rischannel.scenario.IndexMap`.
"""

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .physics import green_matrix, inverse_polarizability, wavenumber
from .scenario import (
    RisConfiguration,
    canonical_dipoles,
    canonical_positions,
    configuration_to_inverse_polarizabilities,
)

_MAGIC = b"RISW"


def _frozen(a):
    a = np.array(a, dtype=np.complex128, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class InteractionMatrix:
    """Dense interaction matrix at one frequency.

    ``positions`` holds the (N, 2) dipole coordinates in canonical order; the
    displacement updates need them. Arrays are read-only.
    """

    w: np.ndarray
    map: object
    f: float
    cfg: RisConfiguration
    positions: np.ndarray = None

    @property
    def k(self):
        return wavenumber(self.f)


def assemble(sc, imap, f, cfg, *, lam=0.0):
    """Build W for scenario ``sc`` at ``f`` GHz with RIS configuration ``cfg``.

    ``lam`` is subtracted from every static-environment diagonal entry; it
    exists so tests and ``--scratch`` paths can re-assemble shifted systems.
    """
    positions = canonical_positions(sc, imap)
    w = -green_matrix(positions, wavenumber(f))
    diag = np.array([inverse_polarizability(f, d) for d in canonical_dipoles(sc, imap)],
                    dtype=np.complex128)
    diag[imap.slice("S")] = configuration_to_inverse_polarizabilities(sc, cfg, f)
    diag[imap.slice("Pbar")] -= lam
    w[np.diag_indices_from(w)] = diag
    pos = positions.copy()
    pos.setflags(write=False)
    return InteractionMatrix(_frozen(w), imap, float(f), cfg, pos)


def block(wm, rows, cols):
    """Copy of the (rows, cols) block; groups as in :meth:`IndexMap.slice`."""
    return wm.w[wm.map.slice(rows), wm.map.slice(cols)].copy()


def set_ris_diagonal(wm, c, cfg=None):
    """New matrix whose S-diagonal equals ``c``; all other entries untouched."""
    c = np.asarray(c, dtype=np.complex128)
    sl = wm.map.slice("S")
    if c.shape != (sl.stop - sl.start,):
        raise ValueError(f"expected {sl.stop - sl.start} RIS values, got shape {c.shape}")
    w = wm.w.copy()
    idx = np.arange(sl.start, sl.stop)
    w[idx, idx] = c
    if cfg is None:
        cfg = RisConfiguration.from_analog(c)
    return InteractionMatrix(_frozen(w), wm.map, wm.f, cfg, wm.positions)


def ris_diagonal(wm):
    sl = wm.map.slice("S")
    return np.diagonal(wm.w)[sl].copy()


def write_binary(wm, path):
    """Dump W as 'RISW' + u32 N + u32 reserved, then row-major <c16 entries."""
    n = wm.w.shape[0]
    with open(path, "wb") as fh:
        fh.write(_MAGIC + struct.pack("<II", n, 0))
        fh.write(np.ascontiguousarray(wm.w, dtype="<c16").tobytes())


def read_binary(path):
    """Inverse of :func:`write_binary`; returns the raw (N, N) array."""
    data = Path(path).read_bytes()
    if data[:4] != _MAGIC:
        raise ValueError(f"{path}: bad magic {data[:4]!r}")
    n, _ = struct.unpack("<II", data[4:12])
    body = data[12:]
    if len(body) != 16 * n * n:
        raise ValueError(f"{path}: expected {16 * n * n} payload bytes, got {len(body)}")
    return np.frombuffer(body, dtype="<c16").reshape(n, n).astype(np.complex128)
