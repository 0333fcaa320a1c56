"""Ground-state population, Landau-Zener reference and 1-D optimum search."""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .baths import Environment
from .dynamics import integrate
from .model import DEFAULT_SPAN_PRODUCT, GAP, SweepProtocol

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class PopulationTrace:
    times: np.ndarray
    p_ground: np.ndarray

    @property
    def final(self):
        return float(self.p_ground[-1])

    @property
    def minimum(self):
        return float(self.p_ground.min())

    @property
    def argmin_time(self):
        return float(self.times[int(np.argmin(self.p_ground))])


@dataclass(frozen=True)
class OptimumResult:
    """Located optimum plus the coarse scan it was refined from."""
    x: float
    value: float
    grid: tuple
    grid_values: tuple


def ground_population(state):
    """Overlap with the instantaneous ground state, (1 + r_x) / 2."""
    return 0.5 * (1.0 + state.r_x)


def lz_asymptote(velocity, delta=GAP):
    if not velocity > 0.0:
        raise ValueError(f"velocity must be positive, got {velocity!r}")
    return -math.expm1(-math.pi * delta ** 2 / (2.0 * velocity))


def relative_gain(p_xz, p_z):
    """``(p_xz - p_z) / p_z``: improvement from the transverse bath."""
    if p_z == 0.0:
        raise ValueError("relative gain undefined for p_z = 0")
    return (p_xz - p_z) / p_z


def population_trace(traj):
    return PopulationTrace(traj.times.copy(), 0.5 * (1.0 + traj.states[:, 0]))


def final_population(velocity, env, config=None, span_product=DEFAULT_SPAN_PRODUCT,
                     offset=0.0):
    traj = integrate(SweepProtocol(velocity, offset, span_product), env, config)
    return ground_population(traj.final_state)


def map_ordered(fn, items, workers=1):
    """``list(map(fn, items))``, optionally on a thread pool.

    The compiled integrator releases the GIL, so threads run in parallel.
    Results always come back in input order.
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def golden_section(f, lo, hi, xtol, maximize=False, max_iter=200):
    """Golden-section search for an extremum of ``f`` on [lo, hi].

    Returns ``(x, f(x))`` for the best interior point evaluated.
    """
    sign = -1.0 if maximize else 1.0
    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc = sign * f(c)
    fd = sign * f(d)
    for _ in range(max_iter):
        if abs(b - a) <= xtol:
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = sign * f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = sign * f(d)
    if fc <= fd:
        return c, sign * fc
    return d, sign * fd


def log_grid(lo, hi, n):
    if not (0.0 < lo < hi):
        raise ValueError(f"need 0 < lo < hi, got ({lo!r}, {hi!r})")
    if n < 2:
        raise ValueError("scan needs at least two grid points")
    return np.logspace(math.log10(lo), math.log10(hi), n)


def scan_and_refine(f, grid, xtol_log=0.01, maximize=False, workers=1):
    """Evaluate ``f`` on a positive increasing ``grid``, then refine.

    Golden-section search on log10(x) runs between the neighbours of the
    best grid point; the better of grid point and refined point is
    returned. Ties resolve toward the smaller x.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0 or np.any(grid <= 0.0) or np.any(np.diff(grid) <= 0.0):
        raise ValueError("grid must be non-empty, positive and strictly increasing")
    values = map_ordered(f, grid, workers)
    n = grid.size
    key = (lambda i: (-values[i], grid[i])) if maximize else (lambda i: (values[i], grid[i]))
    best = min(range(n), key=key)
    x, val = grid[best], values[best]
    if n > 1:
        left = grid[max(best - 1, 0)]
        right = grid[min(best + 1, n - 1)]
        x_ref, f_ref = golden_section(lambda u: f(10.0 ** u), math.log10(left),
                                      math.log10(right), xtol_log, maximize)
        candidates = [(x, val), (10.0 ** x_ref, f_ref)]
        if maximize:
            x, val = min(candidates, key=lambda c: (-c[1], c[0]))
        else:
            x, val = min(candidates, key=lambda c: (c[1], c[0]))
    return OptimumResult(float(x), float(val), tuple(float(g) for g in grid),
                         tuple(float(v) for v in values))


def find_optimal_velocity(env, v_range=(0.02, 10.0), config=None, n_grid=16,
                          xtol_log=0.01, span_product=DEFAULT_SPAN_PRODUCT,
                          workers=1):
    """Velocity maximizing the final ground-state population.

    A log-spaced scan picks the best grid point; golden-section search on
    log10(v) then refines between its neighbours. Ties go to smaller v.
    """
    def f(v):
        return final_population(float(v), env, config, span_product)
    return scan_and_refine(f, log_grid(v_range[0], v_range[1], n_grid),
                           xtol_log, maximize=True, workers=workers)


def find_alpha_z_minimum(env, alpha_range=(1e-4, 1.0), velocity=0.5,
                         config=None, n_grid=25, xtol_log=0.01,
                         span_product=DEFAULT_SPAN_PRODUCT, workers=1,
                         grid=None):
    """Longitudinal coupling that minimizes the final population.

    ``env`` is a template: its temperature and both cutoffs are kept; only
    ``alpha_z`` is varied. An explicit ``grid`` overrides ``alpha_range``
    and ``n_grid``.
    """
    if env.bath_x.alpha != 0.0:
        raise ValueError("alpha_z scan expects a template with alpha_x = 0")

    def f(a):
        trial = Environment.ohmic(env.temperature, 0.0, float(a),
                                  env.bath_x.cutoff, env.bath_z.cutoff)
        return final_population(velocity, trial, config, span_product)
    if grid is None:
        grid = log_grid(alpha_range[0], alpha_range[1], n_grid)
    return scan_and_refine(f, grid, xtol_log, maximize=False, workers=workers)
