"""Trigonometric shortcut-to-adiabaticity protocols for atom transport in
cubic and quartic anharmonic traps."""

from .protocols import (
    EXPERIMENTAL_SINE,
    SINE_SINGLE,
    ProtocolAnsatz,
    check_boundary_conditions,
    cosine_ansatz,
    f1_integral,
    f2_integral,
    f_derivative_at_end,
    solve_cosine_coefficients,
    solve_sine_coefficients,
)
from .traps import TrapModel, TransportSchedule, invert_harmonic

__version__ = "0.1.0"
