"""Dissipative Landau-Zener sweeps of a flux qubit with longitudinal and
transverse ohmic baths, integrated via rotating-frame Bloch equations."""
from .analysis import (find_alpha_z_minimum, find_optimal_velocity,
                       ground_population, lz_asymptote, population_trace,
                       relative_gain)
from .baths import Axis, BathSpec, Environment, RateSet, rates_at
from .dynamics import (BlochState, IntegrationError, IntegratorConfig,
                       Trajectory, coherent_lab_frame_oracle, integrate,
                       initial_state)
from .model import GAP, FrameQuantities, SweepProtocol, evaluate_drive, frame_at

__version__ = "0.1.0"
