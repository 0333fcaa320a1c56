"""Ohmic heat baths and the time-dependent Bloch-Redfield rates.

Two baths couple to the qubit: a transverse one through sigma_x and a
longitudinal one through sigma_z. Both share one temperature and have
``J(w) = alpha * w * exp(-w / cutoff)``.
"""
import enum
import math
from dataclasses import dataclass, field

from . import _kernels

DEFAULT_CUTOFF = 10.0


class Axis(enum.Enum):
    TRANSVERSE_X = "x"
    LONGITUDINAL_Z = "z"


@dataclass(frozen=True)
class BathSpec:
    axis: Axis
    alpha: float = 0.0
    cutoff: float = DEFAULT_CUTOFF

    def __post_init__(self):
        if not (self.alpha >= 0.0 and math.isfinite(self.alpha)):
            raise ValueError(f"alpha must be >= 0, got {self.alpha!r}")
        if not (self.cutoff > 0.0 and math.isfinite(self.cutoff)):
            raise ValueError(f"cutoff must be > 0, got {self.cutoff!r}")


@dataclass(frozen=True)
class Environment:
    """Shared temperature plus the two ohmic baths.

    ``temperature == 0`` is allowed and handled as the limit beta -> inf.
    """
    temperature: float
    bath_x: BathSpec = field(default_factory=lambda: BathSpec(Axis.TRANSVERSE_X))
    bath_z: BathSpec = field(default_factory=lambda: BathSpec(Axis.LONGITUDINAL_Z))

    def __post_init__(self):
        if not (self.temperature >= 0.0 and math.isfinite(self.temperature)):
            raise ValueError(f"temperature must be >= 0, got {self.temperature!r}")
        if self.bath_x.axis is not Axis.TRANSVERSE_X:
            raise ValueError("bath_x must be the transverse bath")
        if self.bath_z.axis is not Axis.LONGITUDINAL_Z:
            raise ValueError("bath_z must be the longitudinal bath")

    @classmethod
    def ohmic(cls, temperature, alpha_x=0.0, alpha_z=0.0,
              cutoff_x=DEFAULT_CUTOFF, cutoff_z=DEFAULT_CUTOFF):
        return cls(temperature,
                   BathSpec(Axis.TRANSVERSE_X, alpha_x, cutoff_x),
                   BathSpec(Axis.LONGITUDINAL_Z, alpha_z, cutoff_z))

    @property
    def beta(self):
        return math.inf if self.temperature == 0.0 else 1.0 / self.temperature

    def swapped(self):
        """Same environment with the two couplings (alpha, cutoff) exchanged."""
        return Environment.ohmic(self.temperature,
                                 alpha_x=self.bath_z.alpha, alpha_z=self.bath_x.alpha,
                                 cutoff_x=self.bath_z.cutoff, cutoff_z=self.bath_x.cutoff)


@dataclass(frozen=True)
class RateSet:
    gamma_r: float
    gamma_d: float
    gamma_xz: float
    gamma_zx: float
    r_bar_x: float
    splitting: float
    phi_dot: float


def spectral_density(bath, omega):
    if omega < 0.0:
        raise ValueError(f"spectral density is defined for omega >= 0, got {omega!r}")
    return _kernels.ohmic(bath.alpha, bath.cutoff, omega)


def bose_occupation(beta, omega):
    if omega <= 0.0:
        raise ValueError(f"Bose occupation needs omega > 0, got {omega!r}")
    if beta <= 0.0:
        raise ValueError(f"beta must be positive, got {beta!r}")
    if math.isinf(beta):
        return 0.0
    return 1.0 / math.expm1(beta * omega)


def zero_frequency_weight(bath, beta):
    """Analytic ``lim_{w->0} n(w) J(w) = alpha / beta`` for the ohmic form."""
    if math.isinf(beta):
        return 0.0
    return bath.alpha / beta


def coth(x):
    """Overflow-safe hyperbolic cotangent for x > 0."""
    return _kernels.safe_coth(x)


def rates_at(env, fq):
    """All relaxation/dephasing rates for environment ``env`` at ``fq``."""
    gamma_r, gamma_d, gamma_xz, gamma_zx, r_bar = _kernels.rates(
        env.temperature, env.bath_x.alpha, env.bath_x.cutoff,
        env.bath_z.alpha, env.bath_z.cutoff, fq.splitting, fq.f1, fq.f2)
    return RateSet(gamma_r=gamma_r, gamma_d=gamma_d, gamma_xz=gamma_xz,
                   gamma_zx=gamma_zx, r_bar_x=r_bar,
                   splitting=fq.splitting, phi_dot=fq.phi_dot)
