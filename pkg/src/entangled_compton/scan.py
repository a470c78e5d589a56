"""Scan configuration, spectral grids and tabular output.

Photon energies on grids are given in units of ``4 gamma0^2 omega0`` (the
double-Doppler-shifted laser frequency).  Grid points sit at the right end
of ``n`` equal cells, so a range ``(0, 1.1]`` never evaluates ``omega = 0``.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import os
from dataclasses import dataclass, field
from multiprocessing import get_context

import numpy as np

from . import __version__, kernels
from .amplitudes import (
    Photon,
    ScatteringGeometry,
    double_compton_amplitudes,
    single_compton_amplitude,
)
from .errors import ConfigError, MaskedPointError
from .observables import (
    density_matrix_from_amplitudes,
    double_compton_prefactor,
    emission_probability,
    point_observables,
    single_basis_transform,
    single_compton_prefactor,
    single_density_matrix,
    single_photon_stokes,
)
from .pulse import CIRCULAR_LEFT, CIRCULAR_RIGHT, LINEAR_X, LaserPulse
from .quadrature import Channel, QuadratureSettings
from .relativistic import minkowski_dot

ELECTRON_MASS_EV = 510998.95
WORKERS_ENV = "ECOMPTON_WORKERS"
POLARIZATIONS = {"linear": LINEAR_X, "circular_left": CIRCULAR_LEFT, "circular_right": CIRCULAR_RIGHT}
STOKES_NAMES = tuple(f"s{a}{b}" for a in range(4) for b in range(4))
DEFAULT_OBSERVABLES = ("d2W", "concurrence", "s11", "s22", "s33")


def _floats(text) -> tuple:
    if isinstance(text, (list, tuple)):
        return tuple(float(x) for x in text)
    return tuple(float(x) for x in str(text).split(",") if x.strip())


def _words(text) -> tuple:
    if isinstance(text, (list, tuple)):
        return tuple(str(x).strip().lower() for x in text)
    return tuple(x.strip().lower() for x in str(text).split(",") if x.strip())


@dataclass(frozen=True)
class ScanConfig:
    """Flat scan configuration; every field is also a CLI flag.

    Angles are in radians; ``theta1_gamma``/``theta2_gamma`` (multiples of
    ``1/gamma0``) take precedence over ``theta1``/``theta2`` when set.
    ``omega0_ev`` takes precedence over ``omega0`` (units of m).
    """

    a0: float = 0.1
    omega0: float = 1e-5
    omega0_ev: float | None = None
    gamma0: float = 70.7
    delta_phi: float = 40.0
    polarization: str = "linear"
    theta1: float | None = None
    theta2: float | None = None
    theta1_gamma: float | None = None
    theta2_gamma: float | None = None
    phi1: float = math.pi / 2
    phi2: float = 3 * math.pi / 2
    omega1_lo: float = 0.0
    omega1_hi: float = 1.1
    n1: int = 96
    omega2_lo: float = 0.0
    omega2_hi: float = 1.1
    n2: int = 96
    theta_lo: float = 0.0
    theta_hi: float = 2.0
    n_theta: int = 64
    channels: tuple = ("off",)
    observables: tuple = DEFAULT_OBSERVABLES
    gamma_list: tuple = (10.0, 100.0)
    phi1_list: tuple = (math.pi / 2, 0.0)
    points_per_period: int = 24
    min_points: int = 2048
    rel_tolerance: float = 1e-6
    workers: int | None = None
    output: str | None = None

    def __post_init__(self):
        try:
            set_ = lambda k, v: object.__setattr__(self, k, v)  # noqa: E731
            set_("channels", tuple(Channel(c).value for c in _words(self.channels)))
            set_("observables", _words_keep_case(self.observables))
            set_("gamma_list", _floats(self.gamma_list))
            set_("phi1_list", _floats(self.phi1_list))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        self.validate()

    def validate(self) -> None:
        if self.a0 < 0 or self.gamma0 <= 1 or self.delta_phi <= 0:
            raise ConfigError("need a0 >= 0, gamma0 > 1 and delta_phi > 0")
        if self.omega_laser <= 0:
            raise ConfigError("laser frequency must be positive")
        for n in (self.n1, self.n2, self.n_theta):
            if n < 1:
                raise ConfigError("grid counts must be positive")
        for lo, hi in ((self.omega1_lo, self.omega1_hi), (self.omega2_lo, self.omega2_hi), (self.theta_lo, self.theta_hi)):
            if lo < 0 or hi <= lo:
                raise ConfigError("ranges must satisfy 0 <= lo < hi")
        if self.polarization not in POLARIZATIONS:
            raise ConfigError(f"polarization must be one of {sorted(POLARIZATIONS)}")
        if not self.channels:
            raise ConfigError("at least one channel is required")
        for name in self.observables:
            if name not in ("d2W", "concurrence") + STOKES_NAMES:
                raise ConfigError(f"unknown observable {name!r}")
        if self.points_per_period < 4 or self.min_points < 16:
            raise ConfigError("quadrature settings too coarse")
        if self.workers is not None and self.workers < 1:
            raise ConfigError("workers must be positive")

    @property
    def omega_laser(self) -> float:
        if self.omega0_ev is not None:
            return self.omega0_ev / ELECTRON_MASS_EV
        return self.omega0

    @property
    def scale(self) -> float:
        return 4.0 * self.gamma0**2 * self.omega_laser

    def angle(self, j: int) -> float:
        rel = self.theta1_gamma if j == 0 else self.theta2_gamma
        if rel is not None:
            return rel / self.gamma0
        absolute = self.theta1 if j == 0 else self.theta2
        return 1.0 / self.gamma0 if absolute is None else absolute

    @property
    def pulse(self) -> LaserPulse:
        return LaserPulse(self.a0, self.omega_laser, self.delta_phi, POLARIZATIONS[self.polarization])

    @property
    def settings(self) -> QuadratureSettings:
        return QuadratureSettings(self.points_per_period, self.min_points, self.rel_tolerance)

    def omega_grid(self, which: int) -> np.ndarray:
        lo, hi, n = (self.omega1_lo, self.omega1_hi, self.n1) if which == 0 else (self.omega2_lo, self.omega2_hi, self.n2)
        return cell_grid(lo, hi, n)

    def replace(self, **changes) -> "ScanConfig":
        return dataclasses.replace(self, **changes)

    def resolved(self) -> dict:
        out = dataclasses.asdict(self)
        out["omega_laser_m"] = self.omega_laser
        out["theta1_resolved"] = self.angle(0)
        out["theta2_resolved"] = self.angle(1)
        return out


def _words_keep_case(text) -> tuple:
    if isinstance(text, (list, tuple)):
        return tuple(str(x).strip() for x in text)
    return tuple(x.strip() for x in str(text).split(",") if x.strip())


def cell_grid(lo: float, hi: float, n: int) -> np.ndarray:
    """Right ends of ``n`` equal cells spanning ``(lo, hi]``."""
    return lo + (hi - lo) * np.arange(1, n + 1) / n


# -- config parsing --------------------------------------------------------------

_FIELDS = {f.name: f for f in dataclasses.fields(ScanConfig)}


def _convert(name: str, raw):
    if raw is None:
        return None
    f = _FIELDS[name]
    kind = str(f.type)
    text = str(raw).strip()
    if text.lower() in ("none", "") and "None" in kind:
        return None
    try:
        if kind.startswith("int"):
            return int(text)
        if kind.startswith("float"):
            return float(_eval_number(text))
        if kind == "tuple":
            return text
        return text
    except ValueError:
        raise ConfigError(f"invalid value for {name}: {raw!r}") from None


_PI_NAMES = {"pi": math.pi}


def _eval_number(text: str) -> float:
    # plain floats, or simple products/quotients with pi such as 3*pi/2
    try:
        return float(text)
    except ValueError:
        pass
    value = 1.0
    for i, part in enumerate(text.replace(" ", "").replace("/", " / ").replace("*", " * ").split()):
        if part in ("*", "/"):
            op = part
            continue
        num = _PI_NAMES.get(part.lower())
        num = float(part) if num is None else num
        value = num if i == 0 else (value * num if op == "*" else value / num)
    return value


def parse_config_text(text: str) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _FIELDS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        out[key] = _convert(key, value)
    return out


def build_config(file_values: dict | None = None, overrides: dict | None = None) -> ScanConfig:
    values = {}
    for source in (file_values or {}, overrides or {}):
        for key, value in source.items():
            if value is not None:
                values[key] = value
    try:
        return ScanConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


# -- kinematics helpers ---------------------------------------------------------


def resonance_frequency(s: int, omega1: float, angles, pulse: LaserPulse, p0) -> float:
    """Second-photon energy on the ``s``-photon absorption resonance.

    ``angles = (theta1, phi1, theta2, phi2)``; uses the laser-dressed
    momentum ``p0 + a0^2 / (2 p0.k) k``.
    """
    theta1, phi1, theta2, phi2 = angles
    k = pulse.k
    p0 = np.asarray(p0, dtype=float)
    p_bar = p0 + pulse.a0**2 / (2.0 * minkowski_dot(p0, k)) * k
    q1 = Photon(omega1, theta1, phi1).momentum
    n2 = Photon(1.0, theta2, phi2).momentum
    denom = minkowski_dot(n2, s * k + p_bar - q1)
    if abs(denom) == 0.0:
        raise MaskedPointError("resonance denominator vanishes")
    return float((s * minkowski_dot(k, p0) - minkowski_dot(q1, s * k + p_bar)) / denom)


# -- point evaluation -------------------------------------------------------------


def double_point(config: ScanConfig, omega1: float, omega2: float):
    """Observables per channel at one unscaled energy pair.

    Returns a dict ``channel -> PointObservables``; raises
    :class:`MaskedPointError` for points that cannot be evaluated.
    """
    photons = (
        Photon(omega1, config.angle(0), config.phi1),
        Photon(omega2, config.angle(1), config.phi2),
    )
    geo = ScatteringGeometry(config.pulse, config.gamma0, photons)
    amps = double_compton_amplitudes(geo, config.settings)
    pref = double_compton_prefactor(omega1, omega2, geo.p0, geo.final_momentum, geo.k)
    thetas = (config.angle(0), config.angle(1))
    result = {}
    for ch in config.channels:
        amp = amps.channel(ch)
        rho = density_matrix_from_amplitudes(amp, pref, ch)
        obs = point_observables(rho, (config.phi1, config.phi2), config.omega_laser, thetas)
        result[ch] = (obs, emission_probability(amp, pref), rho)
    return result


def _double_task(args):
    config, i, j = args
    w1 = config.omega_grid(0)[i] * config.scale
    w2 = config.omega_grid(1)[j] * config.scale
    try:
        res = double_point(config, w1, w2)
    except MaskedPointError:
        return None
    return {ch: (obs.d2w_normalized, obs.concurrence, obs.stokes, obs.defined) for ch, (obs, _, _) in res.items()}


def resolve_workers(config: ScanConfig) -> int:
    if config.workers is not None:
        return config.workers
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ConfigError(f"{WORKERS_ENV} must be an integer") from None
        if n < 1:
            raise ConfigError(f"{WORKERS_ENV} must be positive")
        return n
    return 1


def _map(func, tasks, workers: int):
    if workers <= 1 or len(tasks) < 2:
        return [func(t) for t in tasks]
    with get_context("spawn").Pool(workers) as pool:
        return pool.map(func, tasks, chunksize=max(1, len(tasks) // (8 * workers)))


@dataclass
class DoubleScan:
    """Results of a two-photon grid scan, arrays indexed ``[i1, i2]`` per channel."""

    config: ScanConfig
    omega1: np.ndarray
    omega2: np.ndarray
    d2w: dict = field(default_factory=dict)
    concurrence: dict = field(default_factory=dict)
    stokes: dict = field(default_factory=dict)
    masked: np.ndarray | None = None

    @property
    def masked_fraction(self) -> float:
        return float(self.masked.mean())


def run_scan(config: ScanConfig, workers: int | None = None) -> DoubleScan:
    """Evaluate the double-Compton grid; row order is omega1 outer, omega2 inner."""
    w1 = config.omega_grid(0)
    w2 = config.omega_grid(1)
    tasks = [(config, i, j) for i in range(len(w1)) for j in range(len(w2))]
    results = _map(_double_task, tasks, workers or resolve_workers(config))
    shape = (len(w1), len(w2))
    scan = DoubleScan(config, w1, w2, masked=np.zeros(shape, dtype=bool))
    for ch in config.channels:
        scan.d2w[ch] = np.full(shape, np.nan)
        scan.concurrence[ch] = np.full(shape, np.nan)
        scan.stokes[ch] = np.full(shape + (4, 4), np.nan)
    for (_, i, j), res in zip(tasks, results):
        if res is None:
            scan.masked[i, j] = True
            continue
        for ch, (d2w, conc, stokes, _) in res.items():
            scan.d2w[ch][i, j] = d2w
            scan.concurrence[ch][i, j] = conc
            scan.stokes[ch][i, j] = stokes
    return scan


def _fmt(x) -> str:
    if x is None or (isinstance(x, float) and not math.isfinite(x)):
        return ""
    return f"{x:.12g}"


def scan_rows(scan: DoubleScan):
    """CSV header and rows, channel innermost."""
    obs = scan.config.observables
    header = ["omega1_scaled", "omega2_scaled", "channel", *[("d2W_normalized" if o == "d2W" else o) for o in obs], "masked"]
    rows = []
    for i, w1 in enumerate(scan.omega1):
        for j, w2 in enumerate(scan.omega2):
            for ch in scan.config.channels:
                row = [_fmt(float(w1)), _fmt(float(w2)), ch]
                masked = bool(scan.masked[i, j])
                for o in obs:
                    if masked:
                        row.append("")
                    elif o == "d2W":
                        row.append(_fmt(float(scan.d2w[ch][i, j])))
                    elif o == "concurrence":
                        row.append(_fmt(float(scan.concurrence[ch][i, j])))
                    else:
                        a, b = int(o[1]), int(o[2])
                        row.append(_fmt(float(scan.stokes[ch][i, j, a, b])))
                row.append("true" if masked else "false")
                rows.append(row)
    return header, rows


def render_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def metadata(config: ScanConfig, verb: str, extra: dict | None = None) -> dict:
    meta = {
        "verb": verb,
        "version": __version__,
        "kernel_backend": kernels.ACTIVE,
        "config": config.resolved(),
        "quadrature": dataclasses.asdict(config.settings),
        "omega_scale_m": config.scale,
    }
    if extra:
        meta.update(extra)
    return meta


def write_output(text: str, meta: dict, path: str | None) -> None:
    """Write CSV (stdout when ``path`` is None) and a ``.json`` sidecar next to it."""
    if path is None:
        import sys

        sys.stdout.write(text)
        return
    with open(path, "w", newline="") as fh:
        fh.write(text)
    with open(path + ".json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def _json_default(obj):
    if isinstance(obj, tuple):
        return list(obj)
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"cannot serialize {type(obj)}")


# -- single photon ------------------------------------------------------------------


def single_point(config: ScanConfig, omega: float, theta: float, phi: float):
    """``(d1W_normalized, stokes)`` of one-photon emission; Stokes in the HV basis."""
    geo = ScatteringGeometry(config.pulse, config.gamma0, (Photon(omega, theta, phi),))
    amp = single_compton_amplitude(geo, config.settings)
    pref = single_compton_prefactor(omega, geo.p0, geo.final_momentum, geo.k)
    rho = single_density_matrix(amp, pref)
    prob = float(np.trace(rho).real)
    if prob < 1e-30:
        return config.omega_laser * prob, np.full(4, np.nan)
    return config.omega_laser * prob, single_photon_stokes(single_basis_transform(rho, phi))


def _single_task(args):
    config, omega, theta = args
    try:
        return single_point(config, omega, theta, config.phi1)
    except MaskedPointError:
        return None


def run_single_photon_scan(config: ScanConfig, workers: int | None = None):
    """Rows over scaled ``omega`` (outer) and ``theta`` in units of ``1/gamma0`` (inner)."""
    omegas = config.omega_grid(0)
    thetas = np.linspace(config.theta_lo, config.theta_hi, config.n_theta)
    tasks = [(config, w * config.scale, t / config.gamma0) for w in omegas for t in thetas]
    results = _map(_single_task, tasks, workers or resolve_workers(config))
    header = ["omega_scaled", "theta_gamma", "phi", "d1W_normalized", "s1", "s2", "s3", "masked"]
    rows = []
    n_masked = 0
    for (_, w, t), res in zip(tasks, results):
        base = [_fmt(w / config.scale), _fmt(t * config.gamma0), _fmt(config.phi1)]
        if res is None:
            n_masked += 1
            rows.append(base + ["", "", "", "", "true"])
            continue
        prob, s = res
        rows.append(base + [_fmt(prob), *(_fmt(float(x)) for x in s[1:]), "false"])
    return header, rows, n_masked / max(1, len(tasks))


# -- ratio table --------------------------------------------------------------------


@dataclass(frozen=True)
class RatioEntry:
    gamma0: float
    phi1: float
    max_off: float
    max_on: float

    @property
    def ratio(self) -> float:
        return self.max_off / self.max_on if self.max_on > 0 else float("nan")

    @property
    def log10(self) -> float:
        return math.log10(self.ratio) if self.ratio > 0 else float("nan")

    @property
    def order(self) -> int:
        return int(round(self.log10))


def run_ratio_table(config: ScanConfig, workers: int | None = None) -> list[RatioEntry]:
    """``max d2W_off / max d2W_on`` per ``(gamma0, phi1)`` with ``phi2 = phi1 + pi``."""
    entries = []
    for gamma in config.gamma_list:
        for phi1 in config.phi1_list:
            cfg = config.replace(
                gamma0=gamma,
                phi1=phi1,
                phi2=phi1 + math.pi,
                channels=("off", "on"),
                observables=("d2W",),
            )
            scan = run_scan(cfg, workers)
            max_off = float(np.nanmax(scan.d2w["off"])) if not scan.masked.all() else float("nan")
            max_on = float(np.nanmax(scan.d2w["on"])) if not scan.masked.all() else float("nan")
            entries.append(RatioEntry(gamma, phi1, max_off, max_on))
    return entries


def ratio_rows(entries):
    header = ["gamma0", "phi1", "max_d2W_off", "max_d2W_on", "ratio", "log10_ratio", "order"]
    rows = [
        [_fmt(e.gamma0), _fmt(e.phi1), _fmt(e.max_off), _fmt(e.max_on), _fmt(e.ratio), _fmt(e.log10), str(e.order) if math.isfinite(e.log10) else ""]
        for e in entries
    ]
    return header, rows


# -- resonance overlay ----------------------------------------------------------------


@dataclass(frozen=True)
class RidgeMatch:
    """Nearest ridge maximum to one resonance line on one constant-omega1 cut."""

    column: int
    s: int
    line_cell: float
    peak_cell: float  # NaN when the cut has no maximum

    @property
    def distance(self) -> float:
        return abs(self.peak_cell - self.line_cell)


def _refine_peak(profile: np.ndarray, p: int) -> float:
    # vertex of the parabola through the three cells around a maximum
    if 0 < p < len(profile) - 1:
        a, b, c = profile[p - 1 : p + 2]
        curv = a - 2 * b + c
        if curv < 0:
            return p + 0.5 * (a - c) / curv
    return float(p)


def ridge_matches(scan: DoubleScan, channel: str = "off", orders=(1, 2, 3, 4), margin: int = 3, prominence: float = 0.01):
    """Match resonance lines to local maxima of ``log10 d2W`` along each column.

    For every column ``omega1`` and absorption order ``s`` whose line falls at
    least ``margin`` cells inside the ``omega2`` range, the nearest local
    maximum with the given prominence (in decades) is located with sub-cell
    precision.  Distances are in grid cells.
    """
    from scipy.signal import find_peaks

    cfg = scan.config
    pulse = cfg.pulse
    beta = math.sqrt(1.0 - 1.0 / cfg.gamma0**2)
    p0 = np.array([cfg.gamma0, 0.0, 0.0, cfg.gamma0 * beta])
    angles = (cfg.angle(0), cfg.phi1, cfg.angle(1), cfg.phi2)
    w2 = scan.omega2
    step = w2[1] - w2[0]
    out = []
    for i, w1 in enumerate(scan.omega1):
        column = scan.d2w[channel][i]
        if not np.all(np.isfinite(column)) or np.any(column <= 0):
            continue
        profile = np.log10(column)
        peaks, _ = find_peaks(profile, prominence=prominence)
        cells = np.array([_refine_peak(profile, p) for p in peaks])
        for s in orders:
            try:
                line = resonance_frequency(s, w1 * cfg.scale, angles, pulse, p0) / cfg.scale
            except MaskedPointError:
                continue
            pos = (line - w2[0]) / step
            if not margin <= pos <= len(w2) - 1 - margin:
                continue
            peak = float(cells[np.argmin(np.abs(cells - pos))]) if len(cells) else float("nan")
            out.append(RidgeMatch(i, s, float(pos), peak))
    return out
