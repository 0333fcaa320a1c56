"""Linear Landau-Zener drive and the instantaneous adiabatic-frame quantities.

Unit convention: hbar = k_B = 1 and the tunnelling gap is the unit of
energy, ``GAP = 1``. Velocities are in GAP**2, times in 1/GAP and
temperatures in GAP. No dimensional constants appear anywhere else.
"""
import math
from dataclasses import dataclass

GAP = 1.0
DEFAULT_SPAN_PRODUCT = 80.0


@dataclass(frozen=True)
class SweepProtocol:
    """Linear bias sweep ``eps(t) = velocity * t + offset`` on [-t0, t0].

    ``span_product`` is ``velocity * t0``, i.e. how far out (in units of the
    gap) the sweep starts and ends.
    """
    velocity: float
    offset: float = 0.0
    span_product: float = DEFAULT_SPAN_PRODUCT

    def __post_init__(self):
        if not (self.velocity > 0.0 and math.isfinite(self.velocity)):
            raise ValueError(f"velocity must be positive and finite, got {self.velocity!r}")
        if not (self.span_product > 0.0 and math.isfinite(self.span_product)):
            raise ValueError(f"span_product must be positive and finite, got {self.span_product!r}")
        if not math.isfinite(self.offset):
            raise ValueError(f"offset must be finite, got {self.offset!r}")

    @property
    def t0(self):
        return self.span_product / self.velocity

    @property
    def window(self):
        return (-self.t0, self.t0)

    @property
    def max_splitting(self):
        """Largest splitting reached over the window (at one of the ends)."""
        edge = max(abs(self.span_product + self.offset),
                   abs(-self.span_product + self.offset))
        return math.hypot(GAP, edge)


@dataclass(frozen=True)
class FrameQuantities:
    t: float
    eps: float
    splitting: float
    phi: float
    phi_dot: float
    f1: float
    f2: float


def evaluate_drive(protocol, t):
    return protocol.velocity * t + protocol.offset


def frame_at(protocol, t):
    """Instantaneous splitting, mixing angle and its rate at time ``t``.

    ``phi = atan(eps / GAP)`` and ``phi_dot = v GAP / E**2`` (analytic).
    """
    eps = evaluate_drive(protocol, t)
    splitting = math.hypot(GAP, eps)
    return FrameQuantities(
        t=t,
        eps=eps,
        splitting=splitting,
        phi=math.atan2(eps, GAP),
        phi_dot=protocol.velocity * GAP / splitting ** 2,
        f1=eps / splitting,
        f2=GAP / splitting,
    )


def static_frame(eps):
    """Frame quantities for a bias frozen at ``eps`` (no inertial term)."""
    splitting = math.hypot(GAP, eps)
    return FrameQuantities(t=0.0, eps=eps, splitting=splitting,
                           phi=math.atan2(eps, GAP), phi_dot=0.0,
                           f1=eps / splitting, f2=GAP / splitting)
