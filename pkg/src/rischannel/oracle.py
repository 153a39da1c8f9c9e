"""Brute-force reference channel: a full canonical-basis solve of W."""

import warnings
from dataclasses import dataclass

import numpy as np

from . import _linalg
from .errors import ConditioningWarning


@dataclass(frozen=True, eq=False)
class ChannelMatrix:
    """End-to-end channel H (N_R x N_T) at one frequency.

    The proportionality constant relating H to the RT block of the inverse
    interaction matrix is fixed to 1.
    """

    h: np.ndarray
    f: float
    cfg: object = None


def _select_columns(n, cols):
    e = np.zeros((n, cols.stop - cols.start), dtype=np.complex128)
    e[np.arange(cols.start, cols.stop), np.arange(cols.stop - cols.start)] = 1.0
    return e


def rt_block_by_solve(a, imap, what="matrix"):
    """[a^{-1}]_RT via one LU of ``a`` and N_T right-hand sides."""
    fac, rcond = _linalg.factorize(a, what)
    if rcond < _linalg.RCOND_WARN:
        warnings.warn(f"{what} poorly conditioned (rcond {rcond:.2e})", ConditioningWarning, stacklevel=3)
    t = imap.slice("T")
    x = _linalg.solve_factored(fac, _select_columns(a.shape[0], t))
    return x[imap.slice("R"), :]


def channel_full(wm):
    """H = [W^{-1}]_RT from a pivoted LU of the full N x N matrix."""
    return ChannelMatrix(rt_block_by_solve(wm.w, wm.map, "interaction matrix W"), wm.f, wm.cfg)


def compare_channels(a, b):
    """Relative Frobenius error of ``b`` against ``a`` and max absolute deviation."""
    ha = a.h if isinstance(a, ChannelMatrix) else np.asarray(a)
    hb = b.h if isinstance(b, ChannelMatrix) else np.asarray(b)
    if ha.shape != hb.shape:
        raise ValueError(f"shape mismatch {ha.shape} vs {hb.shape}")
    diff = np.abs(ha - hb)
    return {
        "rel_frobenius": _linalg.rel_frobenius(ha, hb),
        "max_abs": float(diff.max()) if diff.size else 0.0,
    }
