"""Randomized fast-path vs. scratch equivalence checks (the ``validate`` command)."""

from dataclasses import dataclass, field

import numpy as np

from .interaction import assemble
from .oracle import channel_full, compare_channels
from .reduction import EigenBasis, channel_from_inverse, channel_from_reduced, reduce, shifted_reduce
from .scenario import RisConfiguration, build_index_map, ris_state_table
from .updates import (
    OneBitEngine,
    combined_update,
    displace_full,
    displace_reduced,
    displacement_delta,
    ris_delta_between,
    trajectory_cache,
    woodbury_full,
)
from .workload import random_bits, random_lambdas, random_positions

TOLERANCES = {
    "reduced": 1e-10,
    "woodbury-full": 1e-9,
    "woodbury-reduced": 1e-9,
    "shifted-reduce": 1e-8,
    "displace-full": 1e-9,
    "displace-reduced": 1e-8,
    "combined": 1e-8,
}


@dataclass
class ValidationResult:
    worst: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)  # (path, instance seed, error)
    tolerances: dict = field(default_factory=dict)

    @property
    def ok(self):
        return not self.failures

    def summary(self):
        lines = []
        for path, tol in self.tolerances.items():
            err = self.worst.get(path)
            if err is None:
                lines.append(f"{path:<18} skipped")
                continue
            status = "ok" if err <= tol else "FAIL"
            lines.append(f"{path:<18} worst {err:.3e}  tol {tol:.0e}  {status}")
        for path, seed, err in self.failures:
            lines.append(f"breach: {path} instance seed {seed} error {err:.3e}")
        return "\n".join(lines)


def _instance_checks(sc, imap, seed, inject):
    """Yield ``(path, rel_error)`` for one seeded instance."""
    rng = np.random.default_rng(seed)
    grid = sc.freq_grid.points()
    f = float(grid[rng.integers(len(grid))])
    n_s = imap.n_ris
    rows, cols = imap.slice("R"), imap.slice("T")

    def err(ref, h):
        h = np.asarray(getattr(h, "h", h))
        if inject:
            h = h + inject * np.linalg.norm(h) / np.sqrt(h.size)
        return compare_channels(ref, h)["rel_frobenius"]

    base_bits = random_bits(rng, n_s)
    base_cfg = RisConfiguration(bits=base_bits)
    wm = assemble(sc, imap, f, base_cfg)
    yield "reduced", err(channel_full(wm), channel_from_reduced(reduce(wm)))

    if n_s:
        target = random_bits(rng, n_s)
        ref = channel_full(assemble(sc, imap, f, RisConfiguration(bits=target)))
        yield "woodbury-reduced", err(ref, OneBitEngine(sc, f, base_bits, imap).channel(target))
        table = ris_state_table(sc, f)
        delta = ris_delta_between(table[np.arange(n_s), base_bits], table[np.arange(n_s), target],
                                  imap.slice("S").start)
        w_inv = np.linalg.inv(wm.w)
        yield "woodbury-full", err(ref, woodbury_full(w_inv, delta)[rows, cols])
    else:
        w_inv = np.linalg.inv(wm.w)

    j = imap.slice("R").start
    group, idx = imap.locate(j)
    new_pos = random_positions(rng, wm.positions, j, 1)[0]
    moved = sc.moved(group, idx, new_pos)
    ref_move = channel_full(assemble(moved, imap, f, base_cfg))
    yield "displace-full", err(ref_move, displace_full(w_inv, displacement_delta(wm, j, new_pos))[rows, cols])

    if imap.s == 0:
        return
    basis = EigenBasis(wm)
    pre = basis.precompute()
    cache = trajectory_cache(basis, j, [new_pos])
    del basis
    lam = random_lambdas(rng, 1)[0]
    ref_lam = channel_full(assemble(sc, imap, f, base_cfg, lam=lam))
    yield "shifted-reduce", err(ref_lam, channel_from_inverse(shifted_reduce(pre, lam), imap))
    yield "displace-reduced", err(ref_move, channel_from_inverse(displace_reduced(pre, cache, 0), imap))

    if n_s:
        target = random_bits(rng, n_s)
        table = ris_state_table(sc, f)
        delta = ris_delta_between(table[np.arange(n_s), base_bits], table[np.arange(n_s), target],
                                  imap.slice("S").start)
        ref = channel_full(assemble(moved, imap, f, RisConfiguration(bits=target), lam=lam))
        yield "combined", err(ref, combined_update(pre, lam, [(cache, 0)], delta))


def run_validation(sc, *, seed=0, instances=10, tolerance=None, inject=0.0):
    """Run every update path on ``instances`` seeded instances of ``sc``.

    ``tolerance`` overrides every per-path tolerance. ``inject`` adds a
    perturbation of that relative size to each fast-path result (fault
    injection for testing the harness).
    """
    imap = build_index_map(sc)
    tols = dict(TOLERANCES) if tolerance is None else {k: float(tolerance) for k in TOLERANCES}
    result = ValidationResult(tolerances=tols)
    for i in range(instances):
        inst_seed = seed * 100_003 + i
        for path, e in _instance_checks(sc, imap, inst_seed, inject):
            result.worst[path] = max(result.worst.get(path, 0.0), e)
            if not e <= tols[path]:
                result.failures.append((path, inst_seed, e))
    return result
