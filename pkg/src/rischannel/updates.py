"""Fast channel-realization updates.

* RIS reconfiguration: Woodbury identity on W^{-1} or on the RT block of
  R^{-1}, with the selector matrices replaced by row/column gathers.
* 1-bit RIS: start from whichever of two complementary baselines is closer
  to the target, so at most floor(N_S / 2) elements change.
* Displacement of dipole j: rank-2 Woodbury update of W^{-1}, or in the
  reduced basis substitution of one Sigma row, one Psi column and one
  W_PP row/column followed by the shifted reduction.
* Combinations: shift and displacements first, RIS delta last.
"""

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import _linalg
from .errors import (
    CollisionError,
    CombinedUpdateError,
    ConditioningError,
    RisChannelError,
    UpdateSingularityError,
)
from .interaction import assemble, set_ris_diagonal
from .oracle import ChannelMatrix
from .physics import green_function, green_row, wavenumber
from .reduction import EigenBasis, reduce, shifted_inverse, shifted_reduce
from .scenario import RisConfiguration, build_index_map, ris_state_table


@dataclass(frozen=True)
class RisDelta:
    """Changes of inverse polarizability for a set of RIS elements.

    ``indices`` are canonical dipole indices inside the S range, strictly
    increasing. ``cfg`` optionally records the configuration reached after
    the update. Zero deltas are allowed and skipped.
    """

    indices: tuple
    delta_alpha_inv: tuple
    cfg: object = None

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        vals = tuple(complex(v) for v in self.delta_alpha_inv)
        if len(idx) != len(vals):
            raise ValueError("indices and delta_alpha_inv differ in length")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError(f"indices must be strictly increasing, got {idx}")
        if not np.all(np.isfinite(np.array(vals, dtype=np.complex128))):
            raise ValueError("deltas must be finite")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "delta_alpha_inv", vals)

    @property
    def m(self):
        return len(self.indices)

    def active(self):
        """(indices, deltas) with zero deltas removed."""
        idx = np.array(self.indices, dtype=np.intp)
        c = np.array(self.delta_alpha_inv, dtype=np.complex128)
        keep = c != 0
        return idx[keep], c[keep]


def ris_delta_between(old, new, ris_offset, cfg=None):
    """Delta taking RIS inverse polarizabilities ``old`` to ``new``."""
    diff = np.asarray(new, dtype=np.complex128) - np.asarray(old, dtype=np.complex128)
    nz = np.flatnonzero(diff)
    return RisDelta(tuple(nz + ris_offset), tuple(diff[nz]), cfg)


def _capacitance_solve(inner, rhs, scale=None):
    """Solve with the inner m x m matrix.

    ``scale`` is the size of the terms summed into ``inner``; when their sum
    cancels to below RCOND_MIN of that size the update is declared singular
    even if ``inner`` itself is well conditioned (e.g. a 1 x 1 matrix).
    """
    try:
        fac, rcond = _linalg.factorize(inner, "Woodbury inner matrix")
    except ConditioningError as e:
        raise UpdateSingularityError(f"{e}; re-assemble instead") from e
    if scale:
        # rcond * ||inner||_1 estimates 1 / ||inner^{-1}||_1
        smallest = rcond * np.linalg.norm(inner, 1)
        if smallest <= _linalg.RCOND_MIN * scale:
            raise UpdateSingularityError(
                f"Woodbury inner matrix cancels to {smallest:.3e} against terms of size "
                f"{scale:.3e}; the updated matrix is singular, re-assemble instead")
    return _linalg.solve_factored(fac, rhs)


def _inner(c, block):
    c_inv = np.diag(1.0 / c)
    scale = max(np.linalg.norm(c_inv, 1), np.linalg.norm(block, 1))
    return c_inv + block, scale


def woodbury_full(w_inv, delta):
    """(W + U C V)^{-1} from W^{-1} for a diagonal RIS change."""
    w_inv = np.asarray(w_inv)
    idx, c = delta.active()
    if idx.size == 0:
        return w_inv.copy()
    left = w_inv[:, idx]
    right = w_inv[idx, :]
    inner, scale = _inner(c, w_inv[np.ix_(idx, idx)])
    return w_inv - left @ _capacitance_solve(inner, right, scale)


def woodbury_rt(r_inv, imap, delta):
    """RT block of (R + U C V)^{-1}; only R- and T-restricted pieces are formed."""
    r_inv = np.asarray(r_inv)
    rows, cols = imap.slice("R"), imap.slice("T")
    h0 = r_inv[rows, cols]
    idx, c = delta.active()
    if idx.size == 0:
        return h0.copy()
    left = r_inv[rows, idx]  # [R^{-1} U]_{R:}
    right = r_inv[idx, cols]  # [V R^{-1}]_{:T}
    inner, scale = _inner(c, r_inv[np.ix_(idx, idx)])
    return h0 - left @ _capacitance_solve(inner, right, scale)


def woodbury_reduced_channel(rs, delta):
    """Channel after a RIS delta, from a cached :class:`ReducedSystem`."""
    return ChannelMatrix(woodbury_rt(rs.r_inv, rs.map, delta), rs.f, delta.cfg)


def one_bit_plan(baseline_bits, target_bits, state_table, ris_offset=0):
    """Pick the complementary baseline nearer to ``target_bits``.

    ``state_table[k]`` holds the two inverse polarizabilities of RIS element
    k. Returns ``("given" | "complement", RisDelta)``; the delta has at most
    floor(N_S / 2) entries.
    """
    base = np.asarray(baseline_bits, dtype=np.int8)
    target = np.asarray(target_bits, dtype=np.int8)
    if base.shape != target.shape:
        raise ValueError("baseline and target lengths differ")
    differ = base != target
    if 2 * int(differ.sum()) <= base.size:
        choice, start, flips = "given", base, differ
    else:
        choice, start, flips = "complement", 1 - base, ~differ
    k = np.flatnonzero(flips)
    table = np.asarray(state_table)
    deltas = table[k, target[k]] - table[k, start[k]]
    return choice, RisDelta(tuple(k + ris_offset), tuple(deltas),
                            RisConfiguration(bits=tuple(int(b) for b in target)))


class OneBitEngine:
    """Reduced-basis channels for arbitrary 1-bit configurations at one frequency.

    Two baselines (``baseline_bits`` and its complement) are reduced once;
    every request then costs one Woodbury update of rank <= floor(N_S / 2).
    """

    def __init__(self, sc, f, baseline_bits=None, imap=None):
        self.imap = imap or build_index_map(sc)
        n_s = self.imap.n_ris
        if baseline_bits is None:
            baseline_bits = (0,) * n_s
        self.f = float(f)
        self.baseline = tuple(int(b) for b in baseline_bits)
        comp = tuple(1 - b for b in self.baseline)
        self.table = ris_state_table(sc, f)
        self.reduced = {
            "given": reduce(assemble(sc, self.imap, f, RisConfiguration(bits=self.baseline))),
            "complement": reduce(assemble(sc, self.imap, f, RisConfiguration(bits=comp))),
        }

    def plan(self, target_bits):
        return one_bit_plan(self.baseline, target_bits, self.table, self.imap.slice("S").start)

    def channel(self, target_bits):
        choice, delta = self.plan(target_bits)
        return woodbury_reduced_channel(self.reduced[choice], delta)


class ChainedInverse:
    """W^{-1} tracked across a chain of RIS updates.

    After ``rebaseline_every`` Woodbury updates the inverse is recomputed from
    the base matrix with the current RIS diagonal, bounding error drift.
    """

    def __init__(self, wm, rebaseline_every=1000):
        self.base = wm
        self.diag = np.diagonal(wm.w)[wm.map.slice("S")].copy()
        self.w_inv = np.linalg.inv(wm.w)
        self.rebaseline_every = int(rebaseline_every)
        self.count = 0
        self.rebaselines = 0

    def apply(self, delta):
        idx, c = delta.active()
        if idx.size == 0:
            return self.w_inv
        self.diag[idx - self.base.map.slice("S").start] += c
        self.count += 1
        if self.count >= self.rebaseline_every:
            self.w_inv = np.linalg.inv(set_ris_diagonal(self.base, self.diag).w)
            self.count = 0
            self.rebaselines += 1
        else:
            self.w_inv = woodbury_full(self.w_inv, delta)
        return self.w_inv

    def channel(self):
        imap = self.base.map
        return ChannelMatrix(self.w_inv[imap.slice("R"), imap.slice("T")].copy(), self.base.f)


# --- displacement ---------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DisplacementDelta:
    """Move of dipole ``dipole_index``; ``delta_g[i]`` is the change of G_ji."""

    dipole_index: int
    new_position: tuple
    delta_g: np.ndarray

    def __post_init__(self):
        if self.delta_g[self.dipole_index] != 0:
            raise ValueError("delta_g must vanish at the displaced dipole")


def displacement_delta(wm, j, new_position):
    """Green's-function changes for moving dipole ``j`` of ``wm`` to ``new_position``."""
    pos = wm.positions
    n = pos.shape[0]
    others = np.delete(np.arange(n), j)
    new = np.asarray(new_position, dtype=np.float64)
    dist = np.hypot(pos[others, 0] - new[0], pos[others, 1] - new[1])
    if np.any(dist == 0.0):
        hit = int(others[np.flatnonzero(dist == 0.0)[0]])
        raise CollisionError(f"dipole {j} would coincide with dipole {hit} at {tuple(new)}")
    k = wm.k
    dg = np.zeros(n, dtype=np.complex128)
    if not np.array_equal(new, pos[j]):
        dg[others] = green_row(new, pos[others], k) - green_row(pos[j], pos[others], k)
    return DisplacementDelta(int(j), (float(new[0]), float(new[1])), dg)


def displace_full(w_inv, delta):
    """W^{-1} after moving one dipole: rank-2 Woodbury update, O(N^2).

    W changes by u e_j^T + e_j u^T with u = -delta_g, i.e. C = I_2,
    U = [u, e_j], V = [e_j; u^T].
    """
    w_inv = np.asarray(w_inv)
    u = -np.asarray(delta.delta_g)
    if not np.any(u):
        return w_inv.copy()
    j = delta.dipole_index
    wu = w_inv @ u
    uw = u @ w_inv
    left = np.column_stack([wu, w_inv[:, j]])
    right = np.vstack([w_inv[j, :], uw])
    corr = np.array([[wu[j], w_inv[j, j]], [uw @ u, uw[j]]])
    inner = np.eye(2, dtype=np.complex128) + corr
    return w_inv - left @ _capacitance_solve(inner, right, max(1.0, np.linalg.norm(corr, 1)))


@dataclass(frozen=True, eq=False)
class TrajectoryCache:
    """Reduced-basis rows for one primary dipole at K candidate positions.

    ``sigma_rows[k]`` and ``psi_cols[k]`` replace row j of Sigma and column j
    of Psi. ``wpp_rows[k]`` is the W_PP row against the other primaries at
    their original positions (entry j is unused; coincident entries are NaN
    and must be overwritten by a co-moving dipole).
    """

    dipole_index: int
    positions: np.ndarray  # K x 2
    sigma_rows: np.ndarray  # K x s
    psi_cols: np.ndarray  # K x s
    wpp_rows: np.ndarray  # K x p

    def __len__(self):
        return self.positions.shape[0]


def _trajectory_entry(basis, j, position, index=None):
    wm = basis.wm
    p = wm.map.p
    k = wm.k
    pos = np.asarray(position, dtype=np.float64)
    static = wm.positions[p:]
    if static.shape[0] and np.any((static[:, 0] == pos[0]) & (static[:, 1] == pos[1])):
        raise CollisionError(
            f"position {index} {tuple(pos)} coincides with a static dipole", position_index=index
        )
    row_ws = -green_row(pos, static, k)
    sigma_row, psi_col = basis.project(row_ws)
    prim = wm.positions[:p]
    wpp = np.full(p, np.nan + 0j)
    clear = np.hypot(prim[:, 0] - pos[0], prim[:, 1] - pos[1]) != 0.0
    clear[j] = False
    wpp[clear] = -green_row(pos, prim[clear], k)
    wpp[j] = 0.0
    return sigma_row, psi_col, wpp


def trajectory_cache(basis, dipole_index, positions):
    """Precompute reduced-basis rows of primary dipole ``dipole_index`` along ``positions``.

    ``basis`` must be the :class:`EigenBasis` the target precompute came
    from. Raises :class:`CollisionError` naming the first position that
    coincides with a static dipole.
    """
    imap = basis.wm.map
    j = int(dipole_index)
    if not imap.is_primary(j):
        raise ValueError(f"dipole {j} is not primary; mark it dynamic to move it in the reduced basis")
    positions = np.asarray(positions, dtype=np.float64).reshape(-1, 2)
    entries = [_trajectory_entry(basis, j, pos, index=i) for i, pos in enumerate(positions)]
    sig, psi, wpp = (np.array(col) for col in zip(*entries)) if entries else (
        np.zeros((0, imap.s), complex), np.zeros((0, imap.s), complex), np.zeros((0, imap.p), complex))
    for a in (positions, sig, psi, wpp):
        a.setflags(write=False)
    return TrajectoryCache(j, positions, sig, psi, wpp)


def precompute_with_trajectories(wm, trajectories):
    """Eigen precompute plus one :class:`TrajectoryCache` per mobile dipole.

    ``trajectories`` maps a canonical primary index to its candidate
    positions. The eigenbasis is released before returning.
    """
    basis = EigenBasis(wm)
    caches = {j: trajectory_cache(basis, j, pts) for j, pts in trajectories.items()}
    return basis.precompute(), caches


def _substitute(pre, rows):
    """Apply ``(j, position, sigma_row, psi_col, wpp_row)`` substitutions; returns
    the updated (w_pp, sigma, psi)."""
    p = pre.map.p
    sigma = pre.sigma.copy()
    psi = pre.psi.copy()
    w_pp = pre.w_pp.copy()
    pos_p = pre.positions_p.copy()
    movers = []
    for j, position, sigma_row, psi_col, wpp_row in rows:
        if not 0 <= j < p:
            raise ValueError(f"dipole {j} is not primary")
        if j in movers:
            raise ValueError(f"dipole {j} moved twice in one realization")
        movers.append(j)
        sigma[j, :] = sigma_row
        psi[:, j] = psi_col
        diag = w_pp[j, j]
        w_pp[j, :] = wpp_row
        w_pp[:, j] = wpp_row
        w_pp[j, j] = diag
        pos_p[j] = position
    if len(movers) > 1:
        k = wavenumber(pre.f)
        for a, b in combinations(movers, 2):
            if pos_p[a, 0] == pos_p[b, 0] and pos_p[a, 1] == pos_p[b, 1]:
                raise CollisionError(f"moving dipoles {a} and {b} coincide at {tuple(pos_p[a])}")
            g = -green_function(pos_p[a], pos_p[b], k)
            w_pp[a, b] = g
            w_pp[b, a] = g
    if not np.all(np.isfinite(w_pp)):
        bad = np.argwhere(~np.isfinite(w_pp))[0]
        raise CollisionError(f"dipoles {bad[0]} and {bad[1]} coincide after displacement")
    return w_pp, sigma, psi


def displace_multi_reduced(pre, moves, lam=0.0):
    """R^{-1} with several primary dipoles displaced simultaneously.

    ``moves`` is a sequence of ``(TrajectoryCache, position_index)``. Rows
    against static dipoles come from the caches; couplings between movers
    are recomputed for the realization.
    """
    rows = []
    for cache, k in moves:
        if not 0 <= k < len(cache):
            raise IndexError(f"position index {k} out of range for a {len(cache)}-point trajectory")
        rows.append((cache.dipole_index, cache.positions[k], cache.sigma_rows[k],
                     cache.psi_cols[k], cache.wpp_rows[k]))
    w_pp, sigma, psi = _substitute(pre, rows)
    return shifted_inverse(w_pp, sigma, psi, pre.d, complex(lam))


def displace_reduced(pre, cache, position_index, lam=0.0):
    """R^{-1} with the cache's dipole at trajectory point ``position_index``."""
    return displace_multi_reduced(pre, [(cache, position_index)], lam)


def displace_reduced_uncached(basis, pre, dipole_index, position, lam=0.0):
    """Same result as :func:`displace_reduced` with the rows computed on the fly.

    Needs the live :class:`EigenBasis`; each call costs O(s^2) for the
    projections on top of the O(s p^2) reduction.
    """
    j = int(dipole_index)
    if not pre.map.is_primary(j):
        raise ValueError(f"dipole {j} is not primary")
    position = np.asarray(position, dtype=np.float64)
    sig, psi_col, wpp = _trajectory_entry(basis, j, position)
    w_pp, sigma, psi = _substitute(pre, [(j, position, sig, psi_col, wpp)])
    return shifted_inverse(w_pp, sigma, psi, pre.d, complex(lam))


def combined_update(pre, lam=0.0, moves=(), ris_delta=None):
    """Channel after a secondary shift, primary displacements, and a RIS delta.

    Shift and displacements are applied through the shifted reduction first;
    the RIS delta is then applied to the RT block by Woodbury. Failures are
    re-raised as :class:`CombinedUpdateError` naming the stage.
    """
    try:
        if moves:
            r_inv = displace_multi_reduced(pre, moves, lam)
        else:
            r_inv = shifted_reduce(pre, lam)
    except (RisChannelError, ValueError, IndexError) as e:
        raise CombinedUpdateError("shift/displacement", e) from e
    imap = pre.map
    if ris_delta is None:
        return ChannelMatrix(r_inv[imap.slice("R"), imap.slice("T")].copy(), pre.f, pre.cfg)
    try:
        h = woodbury_rt(r_inv, imap, ris_delta)
    except RisChannelError as e:
        raise CombinedUpdateError("RIS", e) from e
    return ChannelMatrix(h, pre.f, ris_delta.cfg)
