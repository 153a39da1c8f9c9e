"""Grouped description of a radio environment and its canonical index map.

Dipoles are ordered T, R, S, dynamic E, static E. The first four groups
form the primary set P (size p); static environment dipoles form the
secondary set (size s).
"""

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import ScenarioError
from .physics import DipoleParams, inverse_polarizability

__all__ = [
    "Diagnostic",
    "FreqGrid",
    "IndexMap",
    "RisConfiguration",
    "RisElement",
    "Scenario",
    "build_index_map",
    "configuration_to_inverse_polarizabilities",
    "demo_scenario",
    "dump_scenario",
    "load_scenario",
    "parse_scenario",
    "ris_state_table",
    "scenario_to_dict",
    "uniform_scenario",
    "validate",
]


@dataclass(frozen=True)
class RisElement:
    """1-bit RIS element: a Lorentzian dipole with two resonance states.

    ``base.f_res`` is the state-0 resonance.
    """

    base: DipoleParams
    f_res_state0: float
    f_res_state1: float

    @classmethod
    def make(cls, x, y, chi, gamma, f_res_state0, f_res_state1):
        base = DipoleParams(x, y, f_res_state0, chi, gamma)
        return cls(base, f_res_state0, f_res_state1)

    def state(self, bit):
        f_res = self.f_res_state1 if bit else self.f_res_state0
        return replace(self.base, f_res=f_res)


@dataclass(frozen=True)
class FreqGrid:
    start: float  # GHz
    stop: float
    n_points: int = 1

    def points(self):
        if self.n_points == 1:
            return np.array([float(self.start)])
        return np.linspace(self.start, self.stop, self.n_points)


@dataclass(frozen=True)
class Scenario:
    tx: tuple
    rx: tuple
    ris: tuple = ()
    env: tuple = ()
    dynamic_env: tuple = ()
    freq_grid: FreqGrid = field(default_factory=lambda: FreqGrid(2.45, 2.45, 1))

    def __post_init__(self):
        for name in ("tx", "rx", "ris", "env", "dynamic_env"):
            object.__setattr__(self, name, tuple(getattr(self, name)))

    @property
    def n_dipoles(self):
        return len(self.tx) + len(self.rx) + len(self.ris) + len(self.env)

    def moved(self, group, index, position):
        """Copy of the scenario with dipole ``group[index]`` at ``position``."""
        items = list(getattr(self, group))
        x, y = float(position[0]), float(position[1])
        item = items[index]
        if isinstance(item, RisElement):
            items[index] = replace(item, base=replace(item.base, x=x, y=y))
        else:
            items[index] = replace(item, x=x, y=y)
        return replace(self, **{group: tuple(items)})


@dataclass(frozen=True)
class RisConfiguration:
    """RIS state: either 1-bit states or explicit inverse polarizabilities."""

    bits: tuple = None
    analog: tuple = None

    def __post_init__(self):
        if (self.bits is None) == (self.analog is None):
            raise ValueError("exactly one of bits or analog must be given")
        if self.bits is not None:
            bits = tuple(int(b) for b in self.bits)
            if any(b not in (0, 1) for b in bits):
                raise ValueError(f"bits must be 0/1, got {self.bits}")
            object.__setattr__(self, "bits", bits)
        else:
            analog = tuple(complex(v) for v in self.analog)
            if not all(math.isfinite(v.real) and math.isfinite(v.imag) for v in analog):
                raise ValueError("analog inverse polarizabilities must be finite")
            object.__setattr__(self, "analog", analog)

    @classmethod
    def from_bits(cls, bits):
        if isinstance(bits, str):
            bits = [int(c) for c in bits.strip()]
        return cls(bits=tuple(bits))

    @classmethod
    def from_analog(cls, values):
        return cls(analog=tuple(values))

    @classmethod
    def zeros(cls, n):
        return cls(bits=(0,) * n)

    def __len__(self):
        return len(self.bits if self.bits is not None else self.analog)

    def bitstring(self):
        return "".join(str(b) for b in self.bits)


@dataclass(frozen=True)
class Diagnostic:
    path: str
    message: str

    def __str__(self):
        return f"{self.path}: {self.message}"


def _dipoles(sc):
    """(path, DipoleParams) for every dipole in group order."""
    out = []
    for group in ("tx", "rx"):
        out += [(f"{group}[{i}]", d) for i, d in enumerate(getattr(sc, group))]
    out += [(f"ris[{i}]", r.base) for i, r in enumerate(sc.ris)]
    out += [(f"env[{i}]", d) for i, d in enumerate(sc.env)]
    return out


def _finite(*vals):
    try:
        return all(math.isfinite(float(v)) for v in vals)
    except (TypeError, ValueError):
        return False


def validate(sc):
    """Return a list of :class:`Diagnostic`; empty iff the scenario is valid."""
    diags = []
    if len(sc.tx) < 1:
        diags.append(Diagnostic("tx", "at least one transmitter required"))
    if len(sc.rx) < 1:
        diags.append(Diagnostic("rx", "at least one receiver required"))

    for path, d in _dipoles(sc):
        if not _finite(d.x, d.y, d.f_res, d.chi, d.gamma):
            diags.append(Diagnostic(path, "non-finite field"))
            continue
        if d.f_res <= 0:
            diags.append(Diagnostic(f"{path}.f_res", f"must be > 0, got {d.f_res}"))
        if d.chi <= 0:
            diags.append(Diagnostic(f"{path}.chi", f"must be > 0, got {d.chi}"))
        if d.gamma < 0:
            diags.append(Diagnostic(f"{path}.gamma", f"must be >= 0, got {d.gamma}"))
    for i, r in enumerate(sc.ris):
        for name in ("f_res_state0", "f_res_state1"):
            v = getattr(r, name)
            if not _finite(v) or v <= 0:
                diags.append(Diagnostic(f"ris[{i}].{name}", f"must be finite and > 0, got {v}"))
        if r.base.f_res != r.f_res_state0:
            diags.append(Diagnostic(f"ris[{i}].base.f_res", "must equal f_res_state0"))

    seen = {}
    for path, d in _dipoles(sc):
        if not _finite(d.x, d.y):
            continue
        key = (float(d.x), float(d.y))
        if key in seen:
            diags.append(Diagnostic(path, f"coincident positions with {seen[key]} at {key}"))
        else:
            seen[key] = path

    dyn = list(sc.dynamic_env)
    for i, idx in enumerate(dyn):
        if not isinstance(idx, (int, np.integer)) or not 0 <= idx < len(sc.env):
            diags.append(Diagnostic(f"dynamic_env[{i}]", f"index out of range: {idx}"))
    if len(set(dyn)) != len(dyn):
        diags.append(Diagnostic("dynamic_env", "duplicate indices"))

    fg = sc.freq_grid
    if not _finite(fg.start, fg.stop) or fg.start <= 0:
        diags.append(Diagnostic("freq_grid.start_ghz", "must be finite and > 0"))
    elif fg.start > fg.stop:
        diags.append(Diagnostic("freq_grid", f"start {fg.start} > stop {fg.stop}"))
    if not isinstance(fg.n_points, (int, np.integer)) or fg.n_points < 1:
        diags.append(Diagnostic("freq_grid.n_points", f"must be an integer >= 1, got {fg.n_points}"))
    return diags


@dataclass(frozen=True)
class IndexMap:
    """Contiguous group ranges in canonical order T, R, S, dynamic E, static E.

    ``env_order[k]`` is the position in ``Scenario.env`` of the k-th
    environment dipole in canonical order.
    """

    n_tx: int
    n_rx: int
    n_ris: int
    n_env: int
    env_order: tuple
    n_dynamic: int

    @property
    def n(self):
        return self.n_tx + self.n_rx + self.n_ris + self.n_env

    @property
    def p(self):
        return self.n_tx + self.n_rx + self.n_ris + self.n_dynamic

    @property
    def s(self):
        return self.n - self.p

    def slice(self, group):
        """Index range of ``group`` in {T, R, S, E, D, P, Pbar}."""
        t, r, ris = self.n_tx, self.n_rx, self.n_ris
        bounds = {
            "T": (0, t),
            "R": (t, t + r),
            "S": (t + r, t + r + ris),
            "E": (t + r + ris, self.n),
            "D": (t + r + ris, self.p),
            "P": (0, self.p),
            "Pbar": (self.p, self.n),
        }
        try:
            lo, hi = bounds[group]
        except KeyError:
            raise ValueError(f"unknown group {group!r}") from None
        return slice(lo, hi)

    def global_index(self, group, i):
        """Canonical index of ``Scenario.<group>[i]`` (group in tx/rx/ris/env)."""
        if group == "env":
            return self.slice("E").start + self.env_order.index(i)
        key = {"tx": "T", "rx": "R", "ris": "S"}[group]
        sl = self.slice(key)
        if not 0 <= i < sl.stop - sl.start:
            raise IndexError(f"{group}[{i}] out of range")
        return sl.start + i

    def locate(self, g):
        """Inverse of :meth:`global_index`: ``(group, list_index)``."""
        for group, key in (("tx", "T"), ("rx", "R"), ("ris", "S")):
            sl = self.slice(key)
            if sl.start <= g < sl.stop:
                return group, g - sl.start
        e0 = self.slice("E").start
        if e0 <= g < self.n:
            return "env", self.env_order[g - e0]
        raise IndexError(f"dipole index {g} out of range")

    def is_primary(self, g):
        return 0 <= g < self.p


def build_index_map(sc):
    diags = validate(sc)
    if diags:
        raise ScenarioError("invalid scenario: " + "; ".join(map(str, diags)), diags)
    dyn = sorted(int(i) for i in sc.dynamic_env)
    static = [i for i in range(len(sc.env)) if i not in set(dyn)]
    return IndexMap(
        n_tx=len(sc.tx),
        n_rx=len(sc.rx),
        n_ris=len(sc.ris),
        n_env=len(sc.env),
        env_order=tuple(dyn + static),
        n_dynamic=len(dyn),
    )


def canonical_dipoles(sc, imap):
    """DipoleParams in canonical order; RIS elements at their state-0 base."""
    return (
        list(sc.tx)
        + list(sc.rx)
        + [r.base for r in sc.ris]
        + [sc.env[i] for i in imap.env_order]
    )


def canonical_positions(sc, imap):
    return np.array([(d.x, d.y) for d in canonical_dipoles(sc, imap)], dtype=np.float64).reshape(-1, 2)


def ris_state_table(sc, f):
    """(N_S, 2) inverse polarizabilities of every RIS element in both states."""
    table = np.empty((len(sc.ris), 2), dtype=np.complex128)
    for k, r in enumerate(sc.ris):
        table[k, 0] = inverse_polarizability(f, r.state(0))
        table[k, 1] = inverse_polarizability(f, r.state(1))
    return table


def configuration_to_inverse_polarizabilities(sc, cfg, f):
    if len(cfg) != len(sc.ris):
        raise ValueError(f"configuration length {len(cfg)} != N_S = {len(sc.ris)}")
    if cfg.analog is not None:
        return np.array(cfg.analog, dtype=np.complex128)
    return np.array(
        [inverse_polarizability(f, r.state(b)) for r, b in zip(sc.ris, cfg.bits)],
        dtype=np.complex128,
    )


# --- file format ---------------------------------------------------------

_DIPOLE_KEYS = {"x", "y", "f_res_ghz", "chi", "gamma_ghz"}
_RIS_KEYS = {"x", "y", "chi", "gamma_ghz", "f_res_state0_ghz", "f_res_state1_ghz"}
_GRID_KEYS = {"start_ghz", "stop_ghz", "n_points"}
_TOP_KEYS = {"freq_grid", "tx", "rx", "ris", "env", "dynamic_env"}


def _check_keys(obj, allowed, required, path):
    if not isinstance(obj, dict):
        raise ScenarioError(f"{path}: expected an object, got {type(obj).__name__}")
    unknown = set(obj) - allowed
    if unknown:
        raise ScenarioError(f"{path}: unknown key(s) {sorted(unknown)}")
    missing = required - set(obj)
    if missing:
        raise ScenarioError(f"{path}: missing key(s) {sorted(missing)}")


def _num(v, path):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ScenarioError(f"{path}: expected a number, got {v!r}")
    return float(v)


def _parse_dipole(obj, path):
    _check_keys(obj, _DIPOLE_KEYS, _DIPOLE_KEYS, path)
    return DipoleParams(
        x=_num(obj["x"], f"{path}.x"),
        y=_num(obj["y"], f"{path}.y"),
        f_res=_num(obj["f_res_ghz"], f"{path}.f_res_ghz"),
        chi=_num(obj["chi"], f"{path}.chi"),
        gamma=_num(obj["gamma_ghz"], f"{path}.gamma_ghz"),
    )


def _parse_ris(obj, path):
    _check_keys(obj, _RIS_KEYS, _RIS_KEYS, path)
    return RisElement.make(
        x=_num(obj["x"], f"{path}.x"),
        y=_num(obj["y"], f"{path}.y"),
        chi=_num(obj["chi"], f"{path}.chi"),
        gamma=_num(obj["gamma_ghz"], f"{path}.gamma_ghz"),
        f_res_state0=_num(obj["f_res_state0_ghz"], f"{path}.f_res_state0_ghz"),
        f_res_state1=_num(obj["f_res_state1_ghz"], f"{path}.f_res_state1_ghz"),
    )


def _list(obj, key):
    v = obj.get(key, [])
    if not isinstance(v, list):
        raise ScenarioError(f"{key}: expected a list")
    return v


def parse_scenario(obj):
    """Build a :class:`Scenario` from its JSON document (already decoded).

    Raises :class:`ScenarioError` on unknown keys, wrong types, or failed
    validation.
    """
    _check_keys(obj, _TOP_KEYS, {"freq_grid", "tx", "rx"}, "scenario")
    g = obj["freq_grid"]
    _check_keys(g, _GRID_KEYS, _GRID_KEYS, "freq_grid")
    n_points = g["n_points"]
    if isinstance(n_points, bool) or not isinstance(n_points, int):
        raise ScenarioError(f"freq_grid.n_points: expected an integer, got {n_points!r}")
    dyn = _list(obj, "dynamic_env")
    for i, v in enumerate(dyn):
        if isinstance(v, bool) or not isinstance(v, int):
            raise ScenarioError(f"dynamic_env[{i}]: expected an integer, got {v!r}")
    sc = Scenario(
        tx=[_parse_dipole(d, f"tx[{i}]") for i, d in enumerate(_list(obj, "tx"))],
        rx=[_parse_dipole(d, f"rx[{i}]") for i, d in enumerate(_list(obj, "rx"))],
        ris=[_parse_ris(d, f"ris[{i}]") for i, d in enumerate(_list(obj, "ris"))],
        env=[_parse_dipole(d, f"env[{i}]") for i, d in enumerate(_list(obj, "env"))],
        dynamic_env=dyn,
        freq_grid=FreqGrid(
            _num(g["start_ghz"], "freq_grid.start_ghz"),
            _num(g["stop_ghz"], "freq_grid.stop_ghz"),
            n_points,
        ),
    )
    diags = validate(sc)
    if diags:
        raise ScenarioError("invalid scenario: " + "; ".join(map(str, diags)), diags)
    return sc


def scenario_to_dict(sc):
    def dip(d):
        return {"x": d.x, "y": d.y, "f_res_ghz": d.f_res, "chi": d.chi, "gamma_ghz": d.gamma}

    return {
        "freq_grid": {
            "start_ghz": sc.freq_grid.start,
            "stop_ghz": sc.freq_grid.stop,
            "n_points": sc.freq_grid.n_points,
        },
        "tx": [dip(d) for d in sc.tx],
        "rx": [dip(d) for d in sc.rx],
        "ris": [
            {
                "x": r.base.x,
                "y": r.base.y,
                "chi": r.base.chi,
                "gamma_ghz": r.base.gamma,
                "f_res_state0_ghz": r.f_res_state0,
                "f_res_state1_ghz": r.f_res_state1,
            }
            for r in sc.ris
        ],
        "env": [dip(d) for d in sc.env],
        "dynamic_env": list(sc.dynamic_env),
    }


def load_scenario(path):
    """Read and validate a scenario JSON file.

    ``json.JSONDecodeError`` is converted to :class:`ScenarioError` with the
    line and column of the failure.
    """
    text = Path(path).read_text()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioError(f"{path}: malformed JSON at line {e.lineno} column {e.colno}: {e.msg}") from e
    return parse_scenario(obj)


def dump_scenario(sc, path):
    Path(path).write_text(json.dumps(scenario_to_dict(sc), indent=1) + "\n")


# --- generators ----------------------------------------------------------


def _place(rng, n, box, taken, min_sep):
    """Seeded rejection sampling of ``n`` points in ``box`` at least ``min_sep`` apart."""
    (x0, x1), (y0, y1) = box
    pts = []
    tries = 0
    while len(pts) < n:
        tries += 1
        if tries > 10000 * max(n, 1):
            raise ScenarioError("could not place dipoles; box too small for min_sep")
        p = (float(rng.uniform(x0, x1)), float(rng.uniform(y0, y1)))
        if all(math.hypot(p[0] - q[0], p[1] - q[1]) >= min_sep for q in taken + pts):
            pts.append(p)
    return pts


def uniform_scenario(
    n_tx,
    n_rx,
    n_ris,
    n_env,
    *,
    n_dynamic=0,
    seed=0,
    box=((0.0, 2.0), (0.0, 2.0)),
    min_sep=0.02,
    freq_grid=FreqGrid(2.45, 2.45, 1),
):
    """Seeded random scenario with uniformly placed dipoles.

    Resonances and damping are drawn so that inverse polarizabilities and
    Green's functions have comparable magnitude. The first ``n_dynamic``
    environment dipoles are marked dynamic.
    """
    rng = np.random.default_rng(seed)
    pts = _place(rng, n_tx + n_rx + n_ris + n_env, box, [], min_sep)

    def antenna(p):
        return DipoleParams(p[0], p[1], float(rng.uniform(2.3, 2.6)), 1.0, float(rng.uniform(0.3, 0.6)))

    def scatterer(p):
        return DipoleParams(p[0], p[1], float(rng.uniform(2.8, 3.6)), 1.0, float(rng.uniform(0.2, 0.5)))

    tx = [antenna(p) for p in pts[:n_tx]]
    rx = [antenna(p) for p in pts[n_tx:n_tx + n_rx]]
    ris = [
        RisElement.make(p[0], p[1], 1.0, float(rng.uniform(0.2, 0.4)),
                        float(rng.uniform(2.4, 2.5)), float(rng.uniform(2.7, 2.9)))
        for p in pts[n_tx + n_rx:n_tx + n_rx + n_ris]
    ]
    env = [scatterer(p) for p in pts[n_tx + n_rx + n_ris:]]
    return Scenario(tx, rx, ris, env, tuple(range(n_dynamic)), freq_grid)


def demo_scenario(seed=7):
    """Bundled demo: 2 tx, 2 rx, a 16-element 1-bit RIS, and 120 environment
    dipoles forming a rectangular enclosure with two openings."""
    rng = np.random.default_rng(seed)
    width, height = 2.0, 1.5
    perimeter = 2 * (width + height)
    # 128 evenly spaced wall sites; 8 removed to open two doorways
    sites = np.arange(128) * perimeter / 128
    gaps = set(range(20, 24)) | set(range(84, 88))
    env = []
    for i, t in enumerate(sites):
        if i in gaps:
            continue
        if t < width:
            x, y = t, 0.0
        elif t < width + height:
            x, y = width, t - width
        elif t < 2 * width + height:
            x, y = 2 * width + height - t, height
        else:
            x, y = 0.0, perimeter - t
        jitter = rng.uniform(-0.01, 0.01, size=2)
        env.append(DipoleParams(
            float(round(x + jitter[0], 6)), float(round(y + jitter[1], 6)),
            float(round(rng.uniform(2.9, 3.4), 6)), 1.0, float(round(rng.uniform(0.2, 0.4), 6)),
        ))
    tx = [DipoleParams(0.3, 0.4, 2.45, 1.0, 0.4), DipoleParams(0.3, 0.6, 2.45, 1.0, 0.4)]
    rx = [DipoleParams(1.6, 1.0, 2.45, 1.0, 0.4), DipoleParams(1.7, 1.1, 2.45, 1.0, 0.4)]
    ris = [
        RisElement.make(0.5 + 0.0625 * k, 1.35, 1.0, 0.3, 2.45, 2.8)
        for k in range(16)
    ]
    return Scenario(tx, rx, ris, env, (), FreqGrid(2.40, 2.50, 3))
