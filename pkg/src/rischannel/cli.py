"""Command-line front end.

Exit codes: 0 success, 1 validation failure, 2 input error, 3 numerical failure.
"""

import argparse
import csv
import sys
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from importlib import resources
from pathlib import Path

import numpy as np

from . import checks
from .bench import METHODS, run_bench
from .errors import (
    CollisionError,
    CombinedUpdateError,
    ConditioningError,
    DiagonalizationError,
    ResonanceError,
    ScenarioError,
    SingularGeometryError,
    UpdateSingularityError,
)
from .interaction import assemble
from .oracle import channel_full
from .reduction import EigenBasis, channel_from_inverse, channel_from_reduced, reduce, shifted_reduce
from .scenario import RisConfiguration, build_index_map, load_scenario, uniform_scenario
from .updates import OneBitEngine, displace_reduced, trajectory_cache

EXIT_OK, EXIT_VALIDATION, EXIT_INPUT, EXIT_NUMERICAL = 0, 1, 2, 3

CHANNEL_HEADER = ["freq_ghz", "realization", "rx", "tx", "re", "im"]
TRAJECTORY_HEADER = ["freq_ghz", "realization", "x", "y", "rx", "tx", "re", "im"]


class InputError(Exception):
    pass


def demo_scenario_path():
    return resources.files("rischannel") / "data" / "demo_scenario.json"


def _fmt(v):
    return repr(float(v))


def _channel_rows(f, realization, h, extra=()):
    for r in range(h.shape[0]):
        for t in range(h.shape[1]):
            yield [_fmt(f), realization, *extra, r, t, _fmt(h[r, t].real), _fmt(h[r, t].imag)]


@contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _map_frequencies(fn, freqs, threads):
    """Apply ``fn`` per frequency on a bounded pool; results keep grid order."""
    if threads <= 1 or len(freqs) <= 1:
        return [fn(f) for f in freqs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, freqs))


def _write(args, header, blocks):
    with _output(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for rows in blocks:
            w.writerows(rows)


def _load(args):
    if args.synthetic:
        try:
            n_t, n_r, n_s, n_e = (int(v) for v in args.synthetic.split(","))
        except ValueError:
            raise InputError(f"--synthetic expects NT,NR,NS,NE, got {args.synthetic!r}") from None
        box = max(2.0, 0.2 * np.sqrt(n_t + n_r + n_s + n_e))
        return uniform_scenario(n_t, n_r, n_s, n_e, seed=args.seed, box=((0, box), (0, box)))
    path = args.scenario_pos or args.scenario or demo_scenario_path()
    return load_scenario(path)


def _freqs(sc, selector):
    grid = sc.freq_grid.points()
    if selector is None:
        return list(grid)
    try:
        if ":" in selector:
            lo, hi = selector.split(":")
            sel = grid[int(lo or 0):int(hi) if hi else None]
        else:
            sel = [grid[int(selector)]]
    except (ValueError, IndexError):
        raise InputError(f"bad frequency index range {selector!r} for a {len(grid)}-point grid") from None
    return list(sel)


def _bits(text, n_s, what="--bits"):
    if text is None:
        return (0,) * n_s
    text = text.strip()
    if len(text) != n_s or set(text) - {"0", "1"}:
        raise InputError(f"{what}: expected {n_s} characters of 0/1, got {text!r}")
    return tuple(int(c) for c in text)


def _parse_complex_pair(text, where):
    try:
        re_, im = (float(v) for v in text.replace(" ", "").split(","))
    except ValueError:
        raise InputError(f"{where}: expected 're,im', got {text!r}") from None
    return complex(re_, im)


# --- commands --------------------------------------------------------------


def cmd_channel(args):
    sc = _load(args)
    imap = build_index_map(sc)
    cfg = RisConfiguration(bits=_bits(args.bits, imap.n_ris))

    def one(f):
        wm = assemble(sc, imap, f, cfg)
        h = channel_full(wm) if args.oracle else channel_from_reduced(reduce(wm))
        return list(_channel_rows(f, 0, h.h))

    _write(args, CHANNEL_HEADER, _map_frequencies(one, _freqs(sc, args.freq_index), args.threads))
    return EXIT_OK


def _read_configs(args, n_s, rng):
    configs = []
    if args.configs:
        for lineno, line in enumerate(Path(args.configs).read_text().splitlines(), 1):
            if line.strip() and not line.startswith("#"):
                configs.append(_bits(line, n_s, f"{args.configs}:{lineno}"))
    for text in args.config or ():
        configs.append(_bits(text, n_s, "--config"))
    if args.exhaustive:
        if n_s > 20:
            raise InputError("--exhaustive limited to N_S <= 20")
        configs += [tuple((k >> (n_s - 1 - i)) & 1 for i in range(n_s)) for k in range(2 ** n_s)]
    if args.random:
        configs += [tuple(int(b) for b in rng.integers(0, 2, n_s)) for _ in range(args.random)]
    if not configs:
        raise InputError("no configurations given (use --configs, --config, --random or --exhaustive)")
    return configs


def cmd_sweep_config(args):
    sc = _load(args)
    imap = build_index_map(sc)
    if imap.n_ris < 1:
        raise InputError("sweep-config needs at least one RIS element")
    rng = np.random.default_rng(args.seed)
    configs = _read_configs(args, imap.n_ris, rng)
    baseline = _bits(args.bits, imap.n_ris)

    def one(f):
        rows = []
        if args.scratch:
            for i, bits in enumerate(configs):
                h = channel_full(assemble(sc, imap, f, RisConfiguration(bits=bits))).h
                rows += _channel_rows(f, i, h)
            return rows
        engine = OneBitEngine(sc, f, baseline, imap)
        for i, bits in enumerate(configs):
            rows += _channel_rows(f, i, engine.channel(bits).h)
        return rows

    _write(args, CHANNEL_HEADER, _map_frequencies(one, _freqs(sc, args.freq_index), args.threads))
    return EXIT_OK


def cmd_sweep_lambda(args):
    sc = _load(args)
    imap = build_index_map(sc)
    if imap.s < 1:
        raise InputError("sweep-lambda needs at least one static environment dipole")
    lams = [_parse_complex_pair(t, "--lam") for t in args.lam or ()]
    if args.lambda_file:
        for lineno, line in enumerate(Path(args.lambda_file).read_text().splitlines(), 1):
            if line.strip() and not line.startswith("#"):
                lams.append(_parse_complex_pair(line, f"{args.lambda_file}:{lineno}"))
    if not lams:
        raise InputError("no shifts given (use --lam RE,IM or --lambda-file)")
    cfg = RisConfiguration(bits=_bits(args.bits, imap.n_ris))

    def one(f):
        rows = []
        if args.scratch:
            for i, lam in enumerate(lams):
                rows += _channel_rows(f, i, channel_full(assemble(sc, imap, f, cfg, lam=lam)).h)
            return rows
        wm = assemble(sc, imap, f, cfg)
        try:
            pre = EigenBasis(wm).precompute()
        except DiagonalizationError as e:
            print(f"warning: {e}; falling back to per-shift reduction", file=sys.stderr)
            pre = None
        for i, lam in enumerate(lams):
            if pre is None:
                h = channel_from_reduced(reduce(assemble(sc, imap, f, cfg, lam=lam))).h
            else:
                try:
                    h = channel_from_inverse(shifted_reduce(pre, lam), imap).h
                except ResonanceError as e:
                    raise ResonanceError(f"lambda #{i} = {lam} at {f} GHz: {e}",
                                         eigen_index=e.eigen_index, shift=lam) from e
            rows += _channel_rows(f, i, h)
        return rows

    _write(args, CHANNEL_HEADER, _map_frequencies(one, _freqs(sc, args.freq_index), args.threads))
    return EXIT_OK


def _mobile_index(sc, imap, selector):
    try:
        group, idx = selector.split(":")
        idx = int(idx)
    except ValueError:
        raise InputError(f"--mobile expects GROUP:INDEX (e.g. rx:0), got {selector!r}") from None
    if group not in ("tx", "rx", "ris", "env"):
        raise InputError(f"--mobile group must be tx, rx, ris or env, got {group!r}")
    if not 0 <= idx < len(getattr(sc, group)):
        raise InputError(f"--mobile {selector}: index out of range")
    if group == "env" and idx not in sc.dynamic_env:
        raise InputError(f"env[{idx}] is static; list it in dynamic_env to move it")
    return group, idx, imap.global_index(group, idx)


def _read_positions(path):
    pts = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#") or line.lower().startswith("x"):
            continue
        try:
            x, y = (float(v) for v in line.split(","))
        except ValueError:
            raise InputError(f"{path}:{lineno}: expected 'x,y', got {line!r}") from None
        pts.append((x, y))
    if not pts:
        raise InputError(f"{path}: no positions")
    return pts


def cmd_trajectory(args):
    sc = _load(args)
    imap = build_index_map(sc)
    if not args.mobile or not args.positions:
        raise InputError("trajectory needs --mobile and --positions")
    group, idx, j = _mobile_index(sc, imap, args.mobile)
    pts = _read_positions(args.positions)
    cfg = RisConfiguration(bits=_bits(args.bits, imap.n_ris))

    def scratch_h(f, k, pos):
        try:
            return channel_full(assemble(sc.moved(group, idx, pos), imap, f, cfg)).h
        except SingularGeometryError as e:
            raise CollisionError(f"position {k} {pos}: {e}", position_index=k) from e

    def one(f):
        rows = []
        if args.scratch or imap.s == 0:
            for k, pos in enumerate(pts):
                rows += _channel_rows(f, k, scratch_h(f, k, pos), extra=(_fmt(pos[0]), _fmt(pos[1])))
            return rows
        wm = assemble(sc, imap, f, cfg)
        basis = EigenBasis(wm)
        pre = basis.precompute()
        cache = trajectory_cache(basis, j, pts)
        del basis
        for k, pos in enumerate(pts):
            try:
                r_inv = displace_reduced(pre, cache, k)
            except CollisionError as e:
                raise CollisionError(f"position {k} {pos}: {e}", position_index=k) from e
            rows += _channel_rows(f, k, channel_from_inverse(r_inv, imap).h,
                                  extra=(_fmt(pos[0]), _fmt(pos[1])))
        return rows

    _write(args, TRAJECTORY_HEADER, _map_frequencies(one, _freqs(sc, args.freq_index), args.threads))
    return EXIT_OK


def cmd_bench(args):
    sc = _load(args)
    methods = tuple(m.strip() for m in args.methods.split(",")) if args.methods else METHODS
    for m in methods:
        if m not in METHODS:
            raise InputError(f"unknown method {m!r}; choose from {', '.join(METHODS)}")
    report = run_bench(
        sc,
        realizations=args.realizations,
        methods=methods,
        max_flips=args.max_flips,
        seed=args.seed,
        log=lambda msg: print(msg, file=sys.stderr),
    )
    print(report.table())
    if args.json or args.out:
        Path(args.json or args.out).write_text(report.to_json(indent=1) + "\n")
    return EXIT_OK


def cmd_validate(args):
    sc = _load(args)
    result = checks.run_validation(
        sc,
        seed=args.seed,
        instances=args.instances,
        tolerance=args.tolerance,
        inject=args.inject_error,
    )
    text = result.summary()
    with _output(args.out) as fh:
        print(text, file=fh)
    print("PASS" if result.ok else "FAIL", file=sys.stderr)
    return EXIT_OK if result.ok else EXIT_VALIDATION


# --- parser ----------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("scenario_pos", nargs="?", metavar="SCENARIO",
                        help="scenario JSON (default: bundled demo)")
    common.add_argument("--scenario", help="scenario JSON path")
    common.add_argument("--synthetic", metavar="NT,NR,NS,NE",
                        help="use a seeded uniform random scenario instead of a file")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=1, help="worker threads over frequency points")
    common.add_argument("--scratch", action="store_true",
                        help="recompute every realization from scratch (full solve)")
    common.add_argument("--oracle", action="store_true", help="use the full N x N solve")
    common.add_argument("--tolerance", type=float, help="override validation tolerances")
    common.add_argument("--freq-index", help="frequency index or START:STOP range into the grid")
    common.add_argument("--bits", help="RIS configuration (baseline for sweeps) as a 0/1 string")

    parser = argparse.ArgumentParser(prog="rischannel", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("channel", parents=[common], help="channel matrix per frequency")
    p.set_defaults(func=cmd_channel)

    p = sub.add_parser("sweep-config", parents=[common], help="channels for many RIS configurations")
    p.add_argument("--configs", help="file with one 0/1 string per line")
    p.add_argument("--config", action="append", help="a configuration (repeatable)")
    p.add_argument("--random", type=int, default=0, help="number of seeded random configurations")
    p.add_argument("--exhaustive", action="store_true", help="all 2^N_S configurations")
    p.set_defaults(func=cmd_sweep_config)

    p = sub.add_parser("sweep-lambda", parents=[common], help="channels for uniform environment shifts")
    p.add_argument("--lam", action="append", metavar="RE,IM", help="shift (repeatable)")
    p.add_argument("--lambda-file", help="file with one 're,im' per line")
    p.set_defaults(func=cmd_sweep_lambda)

    p = sub.add_parser("trajectory", parents=[common], help="channels along a dipole trajectory")
    p.add_argument("--mobile", help="moving dipole as GROUP:INDEX, e.g. rx:0 or env:3")
    p.add_argument("--positions", help="CSV file of x,y positions (meters)")
    p.set_defaults(func=cmd_trajectory)

    p = sub.add_parser("bench", parents=[common], help="speedup benchmark vs full re-assembly")
    p.add_argument("--realizations", type=int, default=200)
    p.add_argument("--methods", help=f"comma-separated subset of {','.join(METHODS)}")
    p.add_argument("--max-flips", type=int, default=8)
    p.add_argument("--json", help="write the report JSON here")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("validate", parents=[common], help="randomized fast-path vs scratch checks")
    p.add_argument("--instances", type=int, default=10)
    p.add_argument("--inject-error", type=float, default=0.0, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ScenarioError, SingularGeometryError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (ConditioningError, ResonanceError, UpdateSingularityError, CombinedUpdateError) as e:
        print(f"numerical error: {e}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
