"""Acceptance criteria, one test each; results are summarized at the end of the run."""

import itertools
import time

import numpy as np
import pytest

from conftest import random_scenario
from oracles import j0_series, rel_fro, y0_series
from rischannel.bench import run_bench
from rischannel.interaction import assemble
from rischannel.oracle import channel_full
from rischannel.reduction import EigenBasis, channel_from_reduced, reduce, shifted_reduce
from rischannel.scenario import FreqGrid, RisConfiguration, build_index_map, ris_state_table, uniform_scenario
from rischannel.specfun import bessel_j0, bessel_y0
from rischannel.updates import (
    OneBitEngine,
    combined_update,
    displace_full,
    displace_multi_reduced,
    displace_reduced,
    displacement_delta,
    one_bit_plan,
    precompute_with_trajectories,
    ris_delta_between,
    woodbury_full,
    woodbury_reduced_channel,
)

F = 2.45


def _sizes(rng, max_tr=3, max_s=12, max_e=80, min_e=1):
    return dict(
        n_tx=int(rng.integers(1, max_tr + 1)),
        n_rx=int(rng.integers(1, max_tr + 1)),
        n_ris=int(rng.integers(1, max_s + 1)),
        n_env=int(rng.integers(min_e, max_e + 1)),
    )


def _wm(sc, bits=None, lam=0.0):
    imap = build_index_map(sc)
    cfg = RisConfiguration(bits=tuple(bits)) if bits is not None else RisConfiguration.zeros(imap.n_ris)
    return assemble(sc, imap, F, cfg, lam=lam)


def _moved(sc, imap, j, pos):
    group, idx = imap.locate(j)
    return sc.moved(group, idx, pos)


def _ris_delta(sc, imap, old, new):
    table = ris_state_table(sc, F)
    k = np.arange(imap.n_ris)
    return ris_delta_between(table[k, list(old)], table[k, list(new)], imap.slice("S").start,
                             RisConfiguration(bits=tuple(new)))


def test_reduced_basis_exactness(acceptance):
    rng = np.random.default_rng(1)
    t0 = time.perf_counter()
    worst = 0.0
    for i in range(50):
        sc = random_scenario(1000 + i, **_sizes(rng))
        wm = _wm(sc, rng.integers(0, 2, len(sc.ris)))
        worst = max(worst, rel_fro(channel_full(wm).h, channel_from_reduced(reduce(wm)).h))
    elapsed = time.perf_counter() - t0
    acceptance.check("1 reduced-basis exactness", worst <= 1e-10 and elapsed < 10,
                     f"worst {worst:.2e} (tol 1e-10), {elapsed:.2f} s (limit 10 s)")


def test_woodbury_ris_update(acceptance):
    rng = np.random.default_rng(2)
    t0 = time.perf_counter()
    worst = 0.0
    for i in range(100):
        sc = random_scenario(2000 + i, **_sizes(rng))
        imap = build_index_map(sc)
        n_s = imap.n_ris
        base = tuple(rng.integers(0, 2, n_s))
        m = int(rng.integers(1, n_s + 1))
        flip = rng.choice(n_s, m, replace=False)
        target = list(base)
        for k in flip:
            target[k] = 1 - target[k]
        delta = _ris_delta(sc, imap, base, target)
        assert delta.m == m
        wm = _wm(sc, base)
        ref = channel_full(_wm(sc, target)).h
        worst = max(worst, rel_fro(ref, woodbury_reduced_channel(reduce(wm), delta).h))
        full = woodbury_full(np.linalg.inv(wm.w), delta)
        worst = max(worst, rel_fro(ref, full[imap.slice("R"), imap.slice("T")]))
    elapsed = time.perf_counter() - t0
    acceptance.check("2 Woodbury RIS update", worst <= 1e-9 and elapsed < 30,
                     f"worst {worst:.2e} (tol 1e-9), {elapsed:.2f} s (limit 30 s)")


def test_one_bit_baselines(acceptance):
    sc = random_scenario(3000, n_tx=2, n_rx=2, n_ris=16, n_env=60)
    imap = build_index_map(sc)
    rng = np.random.default_rng(3)
    base = tuple(rng.integers(0, 2, 16))
    table = ris_state_table(sc, F)
    max_m = 0
    for target in itertools.product((0, 1), repeat=16):
        max_m = max(max_m, one_bit_plan(base, target, table)[1].m)
    engine = OneBitEngine(sc, F, base, imap)
    worst = 0.0
    for _ in range(50):
        target = tuple(rng.integers(0, 2, 16))
        worst = max(worst, rel_fro(channel_full(_wm(sc, target)).h, engine.channel(target).h))
    acceptance.check("3 1-bit baseline optimization", max_m <= 8 and worst <= 1e-9,
                     f"max flips {max_m} over 65536 targets (limit 8), worst {worst:.2e} (tol 1e-9)")


def test_eigen_shift(acceptance):
    rng = np.random.default_rng(4)
    worst = worst0 = 0.0
    for i in range(20):
        sc = random_scenario(4000 + i, **_sizes(rng, min_e=5), n_dynamic=int(rng.integers(0, 3)))
        wm = _wm(sc)
        pre = EigenBasis(wm).precompute()
        worst0 = max(worst0, rel_fro(reduce(wm).r_inv, shifted_reduce(pre, 0.0)))
        for _ in range(20):
            lam = complex(*rng.normal(scale=0.1, size=2))
            worst = max(worst, rel_fro(reduce(_wm(sc, lam=lam)).r_inv, shifted_reduce(pre, lam)))
    acceptance.check("4 eigen-shift update", worst <= 1e-8 and worst0 <= 1e-8,
                     f"worst {worst:.2e}, lambda=0 {worst0:.2e} (tol 1e-8)")


def test_displacement(acceptance):
    rng = np.random.default_rng(5)
    worst_full = worst_red = worst_null = 0.0
    for i in range(50):
        sc = random_scenario(5000 + i, **_sizes(rng, min_e=5), n_dynamic=1)
        wm = _wm(sc)
        imap = wm.map
        if i < 10:
            a, b = (int(x) for x in rng.choice(imap.p, 2, replace=False))
            pa = wm.positions[a] + rng.uniform(-0.1, 0.1, 2)
            pb = wm.positions[b] + rng.uniform(-0.1, 0.1, 2)
            pre, caches = precompute_with_trajectories(wm, {a: [pa], b: [pb]})
            moved = _moved(_moved(sc, imap, a, pa), imap, b, pb)
            ref = reduce(_wm(moved)).r_inv
            worst_red = max(worst_red, rel_fro(ref, displace_multi_reduced(pre, [(caches[a], 0), (caches[b], 0)])))
            w_inv = displace_full(np.linalg.inv(wm.w), displacement_delta(wm, a, pa))
            mid = _wm(_moved(sc, imap, a, pa))
            w_inv = displace_full(w_inv, displacement_delta(mid, b, pb))
            worst_full = max(worst_full, rel_fro(np.linalg.inv(_wm(moved).w), w_inv))
            continue
        j = int(rng.integers(imap.p))
        new = wm.positions[j] + rng.uniform(-0.1, 0.1, 2)
        moved = _wm(_moved(sc, imap, j, new))
        w_inv = np.linalg.inv(wm.w)
        worst_full = max(worst_full, rel_fro(np.linalg.inv(moved.w),
                                             displace_full(w_inv, displacement_delta(wm, j, new))))
        pre, caches = precompute_with_trajectories(wm, {j: [new, wm.positions[j]]})
        worst_red = max(worst_red, rel_fro(reduce(moved).r_inv, displace_reduced(pre, caches[j], 0)))
        worst_null = max(worst_null, rel_fro(reduce(wm).r_inv, displace_reduced(pre, caches[j], 1)),
                         rel_fro(w_inv, displace_full(w_inv, displacement_delta(wm, j, wm.positions[j]))))
    ok = worst_full <= 1e-9 and worst_red <= 1e-8 and worst_null <= 1e-8
    acceptance.check("5 displacement updates", ok,
                     f"rank-2 {worst_full:.2e} (tol 1e-9), reduced {worst_red:.2e} (tol 1e-8), "
                     f"null move {worst_null:.2e}")


def test_combined(acceptance):
    rng = np.random.default_rng(6)
    worst = 0.0
    for i in range(20):
        sc = random_scenario(6000 + i, **_sizes(rng, min_e=5))
        wm = _wm(sc)
        imap = wm.map
        j = int(rng.integers(imap.p))
        new = wm.positions[j] + rng.uniform(-0.1, 0.1, 2)
        lam = complex(*rng.normal(scale=0.1, size=2))
        target = tuple(rng.integers(0, 2, imap.n_ris))
        pre, caches = precompute_with_trajectories(wm, {j: [new]})
        h = combined_update(pre, lam, [(caches[j], 0)], _ris_delta(sc, imap, (0,) * imap.n_ris, target)).h
        ref = channel_full(_wm(_moved(sc, imap, j, new), target, lam=lam)).h
        worst = max(worst, rel_fro(ref, h))
    acceptance.check("6 combined updates", worst <= 1e-8, f"worst {worst:.2e} (tol 1e-8)")


@pytest.mark.slow
def test_performance_floor(acceptance):
    sc = uniform_scenario(2, 2, 46, 950, seed=7, box=((0.0, 6.0), (0.0, 6.0)),
                          freq_grid=FreqGrid(F, F, 1))
    t0 = time.perf_counter()
    report = run_bench(sc, realizations=200, methods=("woodbury-reduced", "shifted-reduce"),
                       max_flips=8, seed=7)
    elapsed = time.perf_counter() - t0
    wr, sr = report.row("woodbury-reduced"), report.row("shifted-reduce")
    ok = (wr.n >= 1000 and wr.p <= 50 and wr.m <= 8 and wr.speedup >= 20 and sr.speedup >= 20
          and wr.max_rel_error <= 1e-9 and sr.max_rel_error <= 1e-8 and elapsed <= 300)
    acceptance.check("7 performance floor", ok,
                     f"N={wr.n} p={wr.p} m<={wr.m}: reduced Woodbury {wr.speedup:.0f}x, "
                     f"shifted_reduce {sr.speedup:.0f}x (floor 20x), bench {elapsed:.0f} s")


def test_special_functions(acceptance):
    xs = np.linspace(1e-3, 10.0, 1000)
    ej = max(abs(bessel_j0(x) - j0_series(x)) for x in xs)
    ey = max(abs(bessel_y0(x) - y0_series(x)) for x in xs)
    acceptance.check("8 special functions", ej <= 1e-10 and ey <= 1e-10,
                     f"J0 {ej:.2e}, Y0 {ey:.2e} (tol 1e-10)")


def test_structural_invariants(acceptance):
    sc = random_scenario(9000, n_tx=3, n_rx=3, n_ris=12, n_env=80, n_dynamic=2)
    wm = _wm(sc, np.random.default_rng(9).integers(0, 2, 12))
    symmetric = np.array_equal(wm.w, wm.w.T)
    pre = EigenBasis(wm).precompute()
    p, s = wm.map.p, wm.map.s
    shapes = {k: v.shape for k, v in pre.retained_arrays().items()}
    no_square = all(shape != (s, s) for shape in shapes.values())
    expected = 16 * (2 * p * s + s + p * p) + 8 * 2 * p
    acceptance.check("9 structural invariants", symmetric and no_square and pre.nbytes() == expected,
                     f"bit-exact symmetry {symmetric}, retained {shapes}, {pre.nbytes()} bytes")
