"""Speedup benchmark of the update paths against full re-assembly + solve."""

import json
import statistics
import time
from dataclasses import asdict, dataclass, field

import jsonschema
import numpy as np

from .interaction import assemble
from .oracle import channel_full, compare_channels
from .reduction import EigenBasis, channel_from_reduced, reduce, shifted_reduce
from .scenario import RisConfiguration, build_index_map, ris_state_table
from .updates import (
    OneBitEngine,
    displace_reduced,
    ris_delta_between,
    trajectory_cache,
    woodbury_full,
)
from .workload import random_lambdas, random_positions, random_targets

METHODS = ("woodbury-reduced", "woodbury-full", "shifted-reduce", "trajectory", "reduce")

REPORT_SCHEMA = {
    "type": "object",
    "required": ["f_ghz", "seed", "baseline_seconds_per_realization", "rows"],
    "additionalProperties": False,
    "properties": {
        "f_ghz": {"type": "number"},
        "seed": {"type": "integer"},
        "baseline_seconds_per_realization": {"type": "number", "exclusiveMinimum": 0},
        "rows": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["method", "n", "p", "s", "m", "realizations", "setup_seconds",
                             "total_seconds", "seconds_per_realization", "speedup",
                             "max_rel_error", "checked", "skipped"],
                "properties": {
                    "method": {"type": "string"},
                    "n": {"type": "integer"},
                    "p": {"type": "integer"},
                    "s": {"type": "integer"},
                    "m": {"type": ["integer", "null"]},
                    "realizations": {"type": "integer"},
                    "setup_seconds": {"type": "number"},
                    "total_seconds": {"type": "number"},
                    "seconds_per_realization": {"type": "number"},
                    "speedup": {"type": "number"},
                    "max_rel_error": {"type": ["number", "null"]},
                    "checked": {"type": "integer"},
                    "skipped": {"type": ["string", "null"]},
                },
            },
        },
    },
}


@dataclass
class BenchRow:
    method: str
    n: int
    p: int
    s: int
    m: int
    realizations: int
    setup_seconds: float = 0.0
    total_seconds: float = 0.0
    seconds_per_realization: float = 0.0
    speedup: float = 0.0
    max_rel_error: float = None
    checked: int = 0
    skipped: str = None


@dataclass
class BenchReport:
    f_ghz: float
    seed: int
    baseline_seconds_per_realization: float
    rows: list = field(default_factory=list)

    def to_dict(self):
        return asdict(self)

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, obj):
        jsonschema.validate(obj, REPORT_SCHEMA)
        return cls(
            obj["f_ghz"],
            obj["seed"],
            obj["baseline_seconds_per_realization"],
            [BenchRow(**r) for r in obj["rows"]],
        )

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def row(self, method):
        return next(r for r in self.rows if r.method == method)

    def table(self):
        head = (f"{'method':<18}{'N':>6}{'p':>5}{'s':>6}{'m':>4}{'R':>6}"
                f"{'s/real':>12}{'speedup':>10}{'max err':>11}")
        lines = [f"baseline (re-assembly + N x N solve): "
                 f"{self.baseline_seconds_per_realization:.4g} s/realization", head]
        for r in self.rows:
            if r.skipped:
                lines.append(f"{r.method:<18}skipped: {r.skipped}")
                continue
            err = "-" if r.max_rel_error is None else f"{r.max_rel_error:.2e}"
            m = "-" if r.m is None else str(r.m)
            lines.append(
                f"{r.method:<18}{r.n:>6}{r.p:>5}{r.s:>6}{m:>4}{r.realizations:>6}"
                f"{r.seconds_per_realization:>12.3e}{r.speedup:>10.1f}{err:>11}"
            )
        return "\n".join(lines)


def _timed_loop(fn, items):
    fn(items[0])  # warm-up, excluded
    t0 = time.perf_counter()
    out = [fn(x) for x in items]
    return time.perf_counter() - t0, out


def _sample(n, k):
    return sorted(set(np.linspace(0, n - 1, min(n, k)).round().astype(int).tolist()))


def run_bench(sc, *, realizations=200, methods=METHODS, max_flips=8, seed=0,
              oracle_samples=5, baseline_repeats=3, baseline_samples=5, f=None, log=None):
    """Time each method over ``realizations`` seeded realizations.

    The baseline re-assembles W and solves the N x N system per realization;
    its cost is the median over ``baseline_repeats`` timed passes of
    ``baseline_samples`` realizations. Every method is oracle-checked on
    ``oracle_samples`` evenly spaced realizations.
    """
    imap = build_index_map(sc)
    f = float(sc.freq_grid.points()[0] if f is None else f)
    rng = np.random.default_rng(seed)
    n_s = imap.n_ris
    base_bits = (0,) * n_s
    base_cfg = RisConfiguration(bits=base_bits)
    say = log or (lambda msg: None)

    targets = random_targets(rng, base_bits, realizations, max_flips) if n_s else []
    lambdas = random_lambdas(rng, realizations)

    # baseline
    sample_cfgs = [RisConfiguration(bits=t) for t in targets[:baseline_samples]] or [base_cfg]

    def scratch(cfg):
        return channel_full(assemble(sc, imap, f, cfg))

    scratch(sample_cfgs[0])
    per = []
    for _ in range(max(3, baseline_repeats)):
        t0 = time.perf_counter()
        for cfg in sample_cfgs:
            scratch(cfg)
        per.append((time.perf_counter() - t0) / len(sample_cfgs))
    baseline = statistics.median(per)
    say(f"baseline {baseline:.4g} s/realization")
    report = BenchReport(f, int(seed), baseline)

    wm = None
    basis = None
    pre = None
    for method in methods:
        if method not in METHODS:
            raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
        row = BenchRow(method, imap.n, imap.p, imap.s, None, realizations)
        try:
            if method in ("woodbury-reduced", "woodbury-full") and n_s == 0:
                raise _Skip("scenario has no RIS elements")
            if method in ("shifted-reduce", "trajectory") and imap.s == 0:
                raise _Skip("scenario has no static environment dipoles")
            if wm is None:
                wm = assemble(sc, imap, f, base_cfg)

            if method == "woodbury-reduced":
                t0 = time.perf_counter()
                engine = OneBitEngine(sc, f, base_bits, imap)
                row.setup_seconds = time.perf_counter() - t0
                row.m = max((engine.plan(t)[1].m for t in targets), default=0)
                elapsed, hs = _timed_loop(engine.channel, targets)
                refs = [(i, lambda i=i: scratch(RisConfiguration(bits=targets[i]))) for i in
                        _sample(realizations, oracle_samples)]

            elif method == "woodbury-full":
                t0 = time.perf_counter()
                w_inv = np.linalg.inv(wm.w)
                table = ris_state_table(sc, f)
                row.setup_seconds = time.perf_counter() - t0
                s0 = imap.slice("S").start
                deltas = [ris_delta_between(table[np.arange(n_s), base_bits],
                                            table[np.arange(n_s), t], s0) for t in targets]
                row.m = max(d.m for d in deltas)
                elapsed, hs = _timed_loop(
                    lambda d: woodbury_full(w_inv, d)[imap.slice("R"), imap.slice("T")], deltas)
                refs = [(i, lambda i=i: scratch(RisConfiguration(bits=targets[i]))) for i in
                        _sample(realizations, oracle_samples)]

            elif method == "shifted-reduce":
                if pre is None:
                    t0 = time.perf_counter()
                    basis = EigenBasis(wm)
                    pre = basis.precompute()
                    pre_seconds = time.perf_counter() - t0
                row.setup_seconds = pre_seconds
                elapsed, hs = _timed_loop(
                    lambda lam: shifted_reduce(pre, lam)[imap.slice("R"), imap.slice("T")], lambdas)
                refs = [(i, lambda i=i: channel_full(assemble(sc, imap, f, base_cfg, lam=lambdas[i])))
                        for i in _sample(realizations, oracle_samples)]

            elif method == "trajectory":
                if basis is None:
                    t0 = time.perf_counter()
                    basis = EigenBasis(wm)
                    pre = basis.precompute()
                    pre_seconds = time.perf_counter() - t0
                j = imap.slice("R").start
                pts = random_positions(rng, wm.positions, j, realizations)
                t0 = time.perf_counter()
                cache = trajectory_cache(basis, j, pts)
                row.setup_seconds = pre_seconds + time.perf_counter() - t0
                elapsed, hs = _timed_loop(
                    lambda k: displace_reduced(pre, cache, k)[imap.slice("R"), imap.slice("T")],
                    list(range(len(pts))))
                group, idx = imap.locate(j)
                refs = [(k, lambda k=k: channel_full(assemble(sc.moved(group, idx, pts[k]), imap, f, base_cfg)))
                        for k in _sample(len(pts), oracle_samples)]

            else:  # reduce from scratch per realization
                cfgs = [RisConfiguration(bits=t) for t in targets] or [base_cfg] * realizations

                def from_scratch(cfg):
                    return channel_from_reduced(reduce(assemble(sc, imap, f, cfg))).h

                sub = cfgs[:max(oracle_samples, 5)]
                row.realizations = len(sub)
                elapsed, hs = _timed_loop(from_scratch, sub)
                refs = [(i, lambda i=i: scratch(sub[i])) for i in range(len(sub))]

            hs = [h.h if hasattr(h, "h") else h for h in hs]
            row.total_seconds = elapsed
            row.seconds_per_realization = elapsed / row.realizations
            row.speedup = baseline / row.seconds_per_realization
            errs = [compare_channels(ref(), hs[i])["rel_frobenius"] for i, ref in refs]
            row.max_rel_error = max(errs) if errs else None
            row.checked = len(errs)
        except _Skip as e:
            row.skipped = str(e)
        except Exception as e:  # precondition failures are reported, not fatal
            row.skipped = f"{type(e).__name__}: {e}"
        say(f"{method}: {row.skipped or f'{row.seconds_per_realization:.3e} s/realization'}")
        report.rows.append(row)
    return report


class _Skip(Exception):
    pass
