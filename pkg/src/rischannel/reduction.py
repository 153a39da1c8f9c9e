"""Reduced-basis representation over the primary dipoles.

The Schur complement

    R = W_PP - W_PPbar W_PbarPbar^{-1} W_PbarP

satisfies [W^{-1}]_PP = R^{-1}, so the channel is the RT block of R^{-1}.
When only a uniform shift ``lam`` of the secondary diagonal changes, an
eigendecomposition W_PbarPbar = Q D Q^{-1} lets R^{-1} be recomputed from
the cached products Sigma = W_PPbar Q and Psi = Q^{-1} W_PbarP in O(s p^2).
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import _linalg
from .errors import ConditioningError, DiagonalizationError, ResonanceError
from .oracle import ChannelMatrix, rt_block_by_solve

EIGVEC_RCOND_MIN = 1e-12
RESONANCE_GUARD = 1e-12


def _readonly(a):
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ReducedSystem:
    r: np.ndarray
    r_inv: np.ndarray
    map: object
    f: float
    cfg: object


def invert(a, what="matrix"):
    """Explicit inverse via a checked LU factorization."""
    fac, _ = _linalg.factorize(a, what)
    return _linalg.solve_factored(fac, np.eye(a.shape[0], dtype=np.complex128))


def schur_complement(w, p):
    """R for a raw (N, N) array whose first ``p`` indices are primary."""
    w_pp = w[:p, :p]
    if w.shape[0] == p:
        return w_pp.copy()
    fac, _ = _linalg.factorize(w[p:, p:], "secondary block W_PbarPbar")
    x = _linalg.solve_factored(fac, w[p:, :p])
    return w_pp - w[:p, p:] @ x


def reduce(wm):
    """Reduce ``wm`` to its primary dipoles.

    W_PbarPbar is LU-factorized and solved against W_PbarP; it is never
    inverted explicitly. Raises :class:`ConditioningError` if it is
    (near-)singular.
    """
    r = schur_complement(wm.w, wm.map.p)
    return ReducedSystem(_readonly(r), _readonly(invert(r, "reduced matrix R")), wm.map, wm.f, wm.cfg)


def channel_from_reduced(rs):
    """H = [R^{-1}]_RT by solving R X = E_T; R is not inverted."""
    return ChannelMatrix(rt_block_by_solve(rs.r, rs.map, "reduced matrix R"), rs.f, rs.cfg)


def channel_from_inverse(r_inv, imap, f=None, cfg=None):
    return ChannelMatrix(np.array(r_inv[imap.slice("R"), imap.slice("T")]), f, cfg)


@dataclass(frozen=True, eq=False)
class EigenPrecompute:
    """Cached products for diagonal-shift and displacement updates.

    Holds only p x s, s x p, p x p, and length-s arrays; the eigenvector
    matrix is dropped once ``sigma`` and ``psi`` are formed.
    """

    sigma: np.ndarray  # p x s
    psi: np.ndarray  # s x p
    d: np.ndarray  # s eigenvalues
    w_pp: np.ndarray  # p x p
    map: object
    f: float
    cfg: object
    positions_p: np.ndarray  # p x 2

    def retained_arrays(self):
        """Every array this object keeps alive, by field name."""
        return {
            name: getattr(self, name)
            for name in ("sigma", "psi", "d", "w_pp", "positions_p")
        }

    def nbytes(self):
        return sum(a.nbytes for a in self.retained_arrays().values())


class EigenBasis:
    """Transient eigendecomposition of W_PbarPbar.

    Holds the s x s eigenvector matrix and its LU factors, which the
    reduced-basis caches are projected through. Build the caches you need,
    call :meth:`precompute`, then drop the basis.
    """

    def __init__(self, wm):
        imap = wm.map
        p, s = imap.p, imap.s
        if s < 1:
            raise ValueError("eigen precompute needs at least one secondary dipole (s >= 1)")
        w_ss = wm.w[p:, p:]
        try:
            d, q = scipy.linalg.eig(w_ss, check_finite=True)
        except (np.linalg.LinAlgError, ValueError) as e:
            raise DiagonalizationError(f"eigendecomposition of W_PbarPbar failed: {e}") from e
        fac, rcond = _linalg.lu_rcond(q)
        if rcond < EIGVEC_RCOND_MIN:
            raise DiagonalizationError(
                f"eigenvector matrix ill-conditioned (rcond estimate {rcond:.3e}); use reduce()",
                rcond=rcond,
            )
        self.wm = wm
        self.d = d
        self.q = q
        self._q_fac = fac
        self.rcond = rcond

    @property
    def static_positions(self):
        return self.wm.positions[self.wm.map.p:]

    def project(self, row):
        """Sigma-row and Psi-column for a primary dipole whose W_PPbar row is ``row``.

        By reciprocity the W_PbarP column equals ``row``; its projections
        differ.
        """
        return row @ self.q, _linalg.solve_factored(self._q_fac, row)

    def precompute(self):
        wm = self.wm
        p = wm.map.p
        sigma = wm.w[:p, p:] @ self.q
        psi = _linalg.solve_factored(self._q_fac, wm.w[p:, :p])
        return EigenPrecompute(
            sigma=_readonly(sigma),
            psi=_readonly(psi),
            d=_readonly(self.d.copy()),
            w_pp=_readonly(wm.w[:p, :p].copy()),
            map=wm.map,
            f=wm.f,
            cfg=wm.cfg,
            positions_p=_readonly(wm.positions[:p].copy()),
        )


def eigen_basis(wm):
    return EigenBasis(wm)


def eigen_precompute(wm):
    """Sigma, Psi, eigenvalues, and W_PP; the eigenbasis is not retained.

    Raises :class:`DiagonalizationError` when the eigendecomposition fails or
    the eigenvector matrix is ill-conditioned; callers should then fall back
    to :func:`reduce`.
    """
    return EigenBasis(wm).precompute()


def check_shift(d, lam):
    if d.size == 0:
        return
    gap = np.abs(d - lam)
    k = int(np.argmin(gap))
    if gap[k] <= RESONANCE_GUARD * np.abs(d).max():
        raise ResonanceError(
            f"shift {lam} is resonant with eigenvalue #{k} = {d[k]} of W_PbarPbar",
            eigen_index=k,
            shift=lam,
        )


def shifted_inverse(w_pp, sigma, psi, d, lam=0.0):
    """(w_pp - sigma diag(1/(d - lam)) psi)^{-1}."""
    check_shift(d, lam)
    scaled = psi * (1.0 / (d - lam))[:, None]
    return invert(w_pp - sigma @ scaled, "shifted reduced matrix")


def shifted_reduce(pre, lam=0.0):
    """R^{-1} after subtracting ``lam`` from every secondary diagonal entry.

    Raises :class:`ResonanceError` if ``lam`` is within the guard distance of
    an eigenvalue of W_PbarPbar.
    """
    lam = complex(lam)
    try:
        return shifted_inverse(pre.w_pp, pre.sigma, pre.psi, pre.d, lam)
    except ConditioningError as e:
        raise ConditioningError(f"shift {lam}: {e}", rcond=e.rcond) from e
