"""Experiment configuration and the sweep/grid/trace runners.

Configs are flat ``key = value`` text files; ``#`` starts a comment.
Grid values accept either a comma list (``0.1, 0.5, 2``) or a generator
``log:LO:HI:N`` / ``lin:LO:HI:N``.
"""
import dataclasses
import logging
import math
from dataclasses import dataclass

import numpy as np

from .analysis import (find_alpha_z_minimum, find_optimal_velocity,
                       final_population, map_ordered, population_trace,
                       relative_gain)
from .baths import DEFAULT_CUTOFF, Environment
from .dynamics import IntegratorConfig, integrate
from .model import DEFAULT_SPAN_PRODUCT, SweepProtocol

log = logging.getLogger(__name__)

KINDS = ("trace", "vsweep", "grid", "azcurve", "optimize")


class ConfigError(ValueError):
    pass


def _log_values(lo, hi, n):
    return tuple(float(x) for x in np.logspace(math.log10(lo), math.log10(hi), n))


@dataclass(frozen=True)
class Table:
    """Rows of floats plus hints for the figure renderers.

    ``layout`` is ``"line"`` (x column vs y columns, optionally one curve
    per distinct ``group`` value) or ``"matrix"`` (first column is the row
    header, remaining column names are the column-header values).
    """
    columns: tuple
    rows: tuple
    layout: str = "line"
    x: str | None = None
    ys: tuple = ()
    group: str | None = None
    log_x: bool = False
    log_y: bool = False
    title: str = ""
    notes: tuple = ()

    def column(self, name):
        i = self.columns.index(name)
        return np.array([r[i] for r in self.rows], dtype=float)


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str = "trace"
    velocity: float = 0.5
    velocities: tuple = _log_values(0.02, 10.0, 30)
    temperature: float = 5.0
    temperatures: tuple = (1.0, 2.5, 5.0)
    alpha_x: float = 5e-3
    alpha_z: float = 5e-3
    alpha_x_grid: tuple = _log_values(1e-4, 1.0, 25)
    alpha_z_grid: tuple = _log_values(1e-4, 1.0, 25)
    overlay_alpha_x: tuple = (0.0, 5e-3)
    mode: str = "both"
    target: str = "velocity"
    v_range: tuple = (0.02, 10.0)
    alpha_range: tuple = (1e-4, 1.0)
    scan_points: int = 16
    cutoff_x: float = DEFAULT_CUTOFF
    cutoff_z: float = DEFAULT_CUTOFF
    offset: float = 0.0
    span_product: float = DEFAULT_SPAN_PRODUCT
    rtol: float = 1e-8
    atol: float = 1e-10
    max_step: float | None = None
    samples: int = 2000
    workers: int = 1
    out: str = "-"
    format: str = "csv"
    figure: str | None = None

    @classmethod
    def for_kind(cls, kind, **overrides):
        """Defaults for ``kind`` (trace sweeps at v = 0.3), then overrides."""
        base = {"kind": kind}
        if kind == "trace":
            base["velocity"] = 0.3
        return cls(**{**base, **overrides})

    def integrator(self):
        return IntegratorConfig(rtol=self.rtol, atol=self.atol,
                                max_step=self.max_step, samples=self.samples)

    def environment(self, temperature=None, alpha_x=None, alpha_z=None):
        return Environment.ohmic(
            self.temperature if temperature is None else temperature,
            self.alpha_x if alpha_x is None else alpha_x,
            self.alpha_z if alpha_z is None else alpha_z,
            self.cutoff_x, self.cutoff_z)

    def protocol(self, velocity=None):
        return SweepProtocol(self.velocity if velocity is None else velocity,
                             self.offset, self.span_product)

    def validate(self):
        """Raise :class:`ConfigError` on the first invalid field."""
        try:
            if self.kind not in KINDS:
                raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
            if self.mode not in ("z", "xz", "both"):
                raise ValueError(f"mode must be z, xz or both, got {self.mode!r}")
            if self.target not in ("velocity", "alpha-z"):
                raise ValueError(f"target must be velocity or alpha-z, got {self.target!r}")
            if self.format not in ("csv", "svg"):
                raise ValueError(f"format must be csv or svg, got {self.format!r}")
            for name in ("velocities", "temperatures", "alpha_x_grid",
                         "alpha_z_grid", "overlay_alpha_x"):
                _check_grid(name, getattr(self, name))
            for name in ("v_range", "alpha_range"):
                lo, hi = getattr(self, name)
                if not 0.0 < lo < hi:
                    raise ValueError(f"{name} needs 0 < lo < hi, got {(lo, hi)}")
            if self.scan_points < 2:
                raise ValueError("scan_points must be >= 2")
            if self.workers < 1:
                raise ValueError("workers must be >= 1")
            # physical invariants are enforced by the domain types
            self.integrator()
            self.protocol()
            for v in self.velocities:
                self.protocol(v)
            for t in self.temperatures:
                self.environment(temperature=t)
            for a in self.alpha_x_grid + self.overlay_alpha_x:
                self.environment(alpha_x=a)
            for a in self.alpha_z_grid:
                self.environment(alpha_z=a)
            self.environment()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        return self


def _check_grid(name, values):
    if len(values) == 0:
        raise ValueError(f"{name} must not be empty")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ValueError(f"{name} must be strictly increasing")


# --- text format -----------------------------------------------------------

_FIELDS = {f.name: f for f in dataclasses.fields(ExperimentConfig)}
_GRID_FIELDS = {"velocities", "temperatures", "alpha_x_grid", "alpha_z_grid",
                "overlay_alpha_x"}
_PAIR_FIELDS = {"v_range", "alpha_range"}
_INT_FIELDS = {"scan_points", "samples", "workers"}
_STR_FIELDS = {"kind", "mode", "target", "out", "format"}
_OPTIONAL = {"max_step", "figure"}


def parse_grid(text):
    text = text.strip()
    if text.startswith(("log:", "lin:")):
        parts = text.split(":")
        if len(parts) != 4:
            raise ConfigError(f"grid generator needs KIND:LO:HI:N, got {text!r}")
        lo, hi, n = float(parts[1]), float(parts[2]), int(parts[3])
        if n < 1:
            raise ConfigError(f"grid needs at least one point, got {text!r}")
        if parts[0] == "log":
            if not (lo > 0 and hi > 0):
                raise ConfigError(f"log grid needs positive bounds, got {text!r}")
            return _log_values(lo, hi, n)
        return tuple(float(x) for x in np.linspace(lo, hi, n))
    return tuple(float(x) for x in text.split(",") if x.strip())


def parse_value(key, text):
    """Convert one textual value to the field's Python type."""
    if key not in _FIELDS:
        raise ConfigError(f"unknown config key {key!r}")
    text = text.strip()
    try:
        if key in _OPTIONAL and text.lower() in ("", "none", "auto"):
            return None
        if key in _GRID_FIELDS:
            return parse_grid(text)
        if key in _PAIR_FIELDS:
            pair = tuple(float(x) for x in text.split(","))
            if len(pair) != 2:
                raise ConfigError(f"{key} needs two comma-separated values")
            return pair
        if key in _INT_FIELDS:
            return int(text)
        if key in _STR_FIELDS or key == "figure":
            return text
        return float(text)
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad value for {key!r}: {text!r}") from exc


def _format_value(value):
    if value is None:
        return "none"
    if isinstance(value, tuple):
        return ", ".join(repr(float(x)) for x in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def parse_config(text, **overrides):
    """Parse ``key = value`` text; ``overrides`` (already typed) win."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip().replace("-", "_")
        values[key] = parse_value(key, value)
    values.update(overrides)
    kind = values.pop("kind", "trace")
    return ExperimentConfig.for_kind(kind, **values).validate()


def serialize_config(cfg):
    return "".join(f"{name} = {_format_value(getattr(cfg, name))}\n"
                   for name in _FIELDS)


def load_config(path, **overrides):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), **overrides)


# --- runners ---------------------------------------------------------------

def run_velocity_sweep(cfg):
    """Final populations for every (temperature, velocity), T outer."""
    integ = cfg.integrator()
    points = [(T, v) for T in cfg.temperatures for v in cfg.velocities]

    def pz(p):
        return final_population(p[1], cfg.environment(p[0], alpha_x=0.0), integ,
                                cfg.span_product, cfg.offset)

    def pxz(p):
        return final_population(p[1], cfg.environment(p[0]), integ,
                                cfg.span_product, cfg.offset)

    if cfg.mode == "z":
        z = map_ordered(pz, points, cfg.workers)
        rows = tuple((T, v, a) for (T, v), a in zip(points, z))
        cols, ys = ("temperature", "velocity", "p_z"), ("p_z",)
    elif cfg.mode == "xz":
        xz = map_ordered(pxz, points, cfg.workers)
        rows = tuple((T, v, b) for (T, v), b in zip(points, xz))
        cols, ys = ("temperature", "velocity", "p_xz"), ("p_xz",)
    else:
        z = map_ordered(pz, points, cfg.workers)
        xz = map_ordered(pxz, points, cfg.workers)
        rows = tuple((T, v, a, b, relative_gain(b, a))
                     for (T, v), a, b in zip(points, z, xz))
        cols, ys = ("temperature", "velocity", "p_z", "p_xz", "gain"), ("gain",)
    return Table(cols, rows, x="velocity", ys=ys, group="temperature",
                 log_x=True, title="final ground-state population vs velocity")


def run_coupling_grid(cfg):
    """p_G on the (alpha_x, alpha_z) grid; rows alpha_x, columns alpha_z."""
    integ = cfg.integrator()
    points = [(ax, az) for ax in cfg.alpha_x_grid for az in cfg.alpha_z_grid]

    def pg(p):
        return final_population(cfg.velocity, cfg.environment(alpha_x=p[0], alpha_z=p[1]),
                                integ, cfg.span_product, cfg.offset)

    values = map_ordered(pg, points, cfg.workers)
    n = len(cfg.alpha_z_grid)
    rows = tuple((ax,) + tuple(values[i * n:(i + 1) * n])
                 for i, ax in enumerate(cfg.alpha_x_grid))
    cols = ("alpha_x\\alpha_z",) + tuple(cfg.alpha_z_grid)
    return Table(cols, rows, layout="matrix", log_x=True, log_y=True,
                 title=f"p_G at T={cfg.temperature:g}, v={cfg.velocity:g}")


def run_alpha_z_curve(cfg):
    """p_G(alpha_z) with no transverse bath, plus the located minimum."""
    template = cfg.environment(alpha_x=0.0)
    opt = find_alpha_z_minimum(template, velocity=cfg.velocity,
                               config=cfg.integrator(),
                               span_product=cfg.span_product,
                               workers=cfg.workers, grid=cfg.alpha_z_grid)
    rows = tuple(zip(opt.grid, opt.grid_values))
    notes = (("alpha_z_min", opt.x), ("p_min", opt.value))
    return Table(("alpha_z", "p_G"), rows, x="alpha_z", ys=("p_G",),
                 log_x=True, title="p_G vs alpha_z (alpha_x = 0)", notes=notes)


def run_time_trace(cfg):
    """Uniformly sampled p_G(t) and Bloch vector, one block per alpha_x."""
    integ = cfg.integrator()
    protocol = cfg.protocol()

    def one(ax):
        return integrate(protocol, cfg.environment(alpha_x=ax), integ)

    rows = []
    notes = []
    for ax, traj in zip(cfg.overlay_alpha_x,
                        map_ordered(one, cfg.overlay_alpha_x, cfg.workers)):
        trace = population_trace(traj)
        for t, p, (rx, ry, rz) in zip(trace.times, trace.p_ground, traj.states):
            rows.append((ax, cfg.alpha_z, float(t), float(p), float(rx),
                         float(ry), float(rz)))
        notes += [(f"final[alpha_x={ax:g}]", trace.final),
                  (f"min[alpha_x={ax:g}]", trace.minimum),
                  (f"max_norm_excess[alpha_x={ax:g}]",
                   traj.metadata["max_norm_excess"])]
    return Table(("alpha_x", "alpha_z", "t", "p_G", "r_x", "r_y", "r_z"),
                 tuple(rows), x="t", ys=("p_G",), group="alpha_x",
                 title=f"p_G(t) at v={cfg.velocity:g}, T={cfg.temperature:g}",
                 notes=tuple(notes))


def run_optimize(cfg):
    """Locate v0 (max p_G) or alpha_z,0 (min p_G, alpha_x = 0)."""
    integ = cfg.integrator()
    if cfg.target == "velocity":
        opt = find_optimal_velocity(cfg.environment(), cfg.v_range, integ,
                                    n_grid=cfg.scan_points,
                                    span_product=cfg.span_product,
                                    workers=cfg.workers)
        name = "velocity"
    else:
        opt = find_alpha_z_minimum(cfg.environment(alpha_x=0.0), cfg.alpha_range,
                                   cfg.velocity, integ, n_grid=cfg.scan_points,
                                   span_product=cfg.span_product,
                                   workers=cfg.workers)
        name = "alpha_z"
    return Table((name, "p_G"), ((opt.x, opt.value),), x=name, ys=("p_G",),
                 log_x=True, title=f"optimum over {name}",
                 notes=tuple(("scan", g, v) for g, v in zip(opt.grid, opt.grid_values)))


RUNNERS = {
    "trace": run_time_trace,
    "vsweep": run_velocity_sweep,
    "grid": run_coupling_grid,
    "azcurve": run_alpha_z_curve,
    "optimize": run_optimize,
}


def run(cfg):
    cfg.validate()
    log.info("running %s", cfg.kind)
    return RUNNERS[cfg.kind](cfg)
