"""Seeded generators of realizations (RIS targets, shifts, positions)."""

import numpy as np


def random_targets(rng, base_bits, n, max_flips):
    """``n`` bit tuples, each differing from ``base_bits`` in 1..max_flips places."""
    base = np.asarray(base_bits, dtype=np.int8)
    n_s = base.size
    out = []
    for _ in range(n):
        m = int(rng.integers(1, min(max_flips, n_s) + 1))
        t = base.copy()
        flip = rng.choice(n_s, size=m, replace=False)
        t[flip] ^= 1
        out.append(tuple(int(b) for b in t))
    return out


def random_bits(rng, n_s):
    return tuple(int(b) for b in rng.integers(0, 2, size=n_s))


def random_lambdas(rng, n, scale=0.1):
    """Complex shifts with real and imaginary parts uniform in [-scale, scale]."""
    return list(rng.uniform(-scale, scale, n) + 1j * rng.uniform(-scale, scale, n))


def random_positions(rng, positions, j, n, min_sep=0.02, radius=0.3):
    """``n`` candidate positions for dipole ``j`` within ``radius`` of its
    current spot, at least ``min_sep`` from every other dipole."""
    positions = np.asarray(positions, dtype=np.float64)
    others = np.delete(positions, j, axis=0)
    origin = positions[j]
    out = []
    while len(out) < n:
        cand = origin + rng.uniform(-radius, radius, size=2)
        if others.size == 0 or np.hypot(*(others - cand).T).min() >= min_sep:
            out.append((float(cand[0]), float(cand[1])))
    return out
