"""Harmonic, cubic and quartic traps, and trap-centre schedules x0(s).

Dimensional helpers (``potential``, ``acceleration``, ``invert_exact_*``)
work in SI units; schedules are dimensionless (positions in units of ``d``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.constants import hbar

from . import protocols
from .numerics import real_cubic_root

KINDS = ("harmonic", "cubic", "quartic")

# Fig. 2 caption values
DEFAULT_OMEGA0 = 2 * math.pi * 1.41e5
DEFAULT_MASS = 40 * 1.667e-27
DEFAULT_D_OVER_A0 = 20.2
DEFAULT_SCHEDULE_SAMPLES = 2001


class TrapDepthError(ValueError):
    """Requested acceleration is beyond what the finite cubic well can supply."""


@dataclass(frozen=True)
class TrapModel:
    kind: str
    omega0: float
    mass: float
    d: float
    xi: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"trap kind must be one of {KINDS}, got {self.kind!r}")
        if self.omega0 <= 0 or self.mass <= 0 or self.d <= 0:
            raise ValueError("omega0, mass and d must be positive")
        if self.kind != "harmonic" and (self.xi is None or not self.xi > 0):
            raise ValueError(f"{self.kind} trap needs xi > 0")

    @classmethod
    def from_oscillator_units(cls, kind, xi_over_d=None, d_over_a0=DEFAULT_D_OVER_A0,
                              omega0=DEFAULT_OMEGA0, mass=DEFAULT_MASS):
        """Build a model with ``d`` given in harmonic lengths a0 = sqrt(hbar/(m omega0))."""
        d = d_over_a0 * math.sqrt(hbar / (mass * omega0))
        xi = None if kind == "harmonic" or xi_over_d is None else xi_over_d * d
        return cls(kind, omega0, mass, d, xi)

    @property
    def a0(self) -> float:
        return math.sqrt(hbar / (self.mass * self.omega0))

    @property
    def d_over_a0(self) -> float:
        return self.d / self.a0

    @property
    def d_over_xi(self) -> float:
        """Dimensionless anharmonicity strength (0 for the harmonic trap)."""
        if self.kind == "harmonic":
            return 0.0
        return self.d / self.xi

    @property
    def energy_scale(self) -> float:
        """m omega0 d^2 / hbar, the prefactor of the residual energy in units of hbar omega0."""
        return self.mass * self.omega0 * self.d**2 / hbar


def potential(model: TrapModel, x, x0):
    y = np.asarray(x, dtype=float) - x0
    k = model.mass * model.omega0**2
    v = 0.5 * k * y**2
    if model.kind == "cubic":
        v = v + k / (3.0 * model.xi) * y**3
    elif model.kind == "quartic":
        v = v + k / (4.0 * model.xi**2) * y**4
    return v


def acceleration(model: TrapModel, x, x0):
    y = np.asarray(x, dtype=float) - x0
    w2 = model.omega0**2
    a = -w2 * y
    if model.kind == "cubic":
        a = a - w2 / model.xi * y**2
    elif model.kind == "quartic":
        a = a - w2 / model.xi**2 * y**3
    return a


def invert_exact_cubic(x: float, xddot: float, model: TrapModel) -> float:
    """Trap centre that produces acceleration ``xddot`` at ``x`` in the cubic trap."""
    radicand = 1.0 - 4.0 * xddot / (model.xi * model.omega0**2)
    if radicand < 0.0:
        raise TrapDepthError(
            f"acceleration {xddot!r} exceeds the cubic-well maximum "
            f"{model.xi * model.omega0**2 / 4!r}")
    return x + 0.5 * model.xi * (1.0 - math.sqrt(radicand))


def invert_exact_quartic(x: float, xddot: float, model: TrapModel) -> float:
    """Trap centre producing ``xddot`` at ``x`` in the quartic trap.

    Solves y + y**3/xi**2 = -xddot/omega0**2 for y = x - x0 (monotone, unique).
    """
    xi2 = model.xi**2
    y = real_cubic_root(xi2, xi2 * xddot / model.omega0**2)
    return x - y


@dataclass(frozen=True)
class TransportSchedule:
    """Sampled trap-centre trajectory x0(s) on a uniform grid of s in [0, 1].

    Calling the schedule interpolates with a not-a-knot cubic spline; ``s`` is
    clamped to [0, 1].
    """

    u: float
    s: np.ndarray
    x0: np.ndarray
    _spline: CubicSpline = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        s = np.asarray(self.s, dtype=float)
        x0 = np.asarray(self.x0, dtype=float)
        if s.ndim != 1 or s.size < 2 or s.shape != x0.shape:
            raise ValueError("schedule needs matching 1-D s and x0 arrays with N >= 2")
        if s[0] != 0.0 or s[-1] != 1.0:
            raise ValueError("schedule grid must cover [0, 1] inclusive")
        if not np.all(np.isfinite(x0)):
            raise ValueError("schedule contains non-finite trap positions")
        if self.u <= 0:
            raise ValueError("u must be positive")
        s.flags.writeable = False
        x0.flags.writeable = False
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "x0", x0)
        bc = "not-a-knot" if s.size > 3 else "natural"
        object.__setattr__(self, "_spline", CubicSpline(s, x0, bc_type=bc))

    def __call__(self, s):
        return self._spline(np.clip(s, 0.0, 1.0))

    def __len__(self):
        return self.s.size

    @classmethod
    def constant(cls, value: float, u: float, n: int = DEFAULT_SCHEDULE_SAMPLES):
        s = np.linspace(0.0, 1.0, n)
        return cls(u, s, np.full(n, float(value)))


def invert_harmonic(ansatz, u: float, n: int = DEFAULT_SCHEDULE_SAMPLES) -> TransportSchedule:
    """x0 = x1 + x1''/u**2, the harmonic-trap inversion of the designed trajectory."""
    if n < 2 or u <= 0:
        raise ValueError("need n >= 2 and u > 0")
    s = np.linspace(0.0, 1.0, n)
    x0 = protocols.eval_x1(ansatz, s) + protocols.eval_ddx1(ansatz, s) / u**2
    return TransportSchedule(u, s, x0)


def invert_exact(ansatz, u: float, model: TrapModel,
                 n: int = DEFAULT_SCHEDULE_SAMPLES) -> TransportSchedule:
    """Schedule for which the full anharmonic trap moves the particle exactly along x1."""
    if model.kind == "harmonic":
        return invert_harmonic(ansatz, u, n)
    s = np.linspace(0.0, 1.0, n)
    x1 = protocols.eval_x1(ansatz, s)
    acc = protocols.eval_ddx1(ansatz, s)
    # dimensionless model: d = 1, omega0 = u, xi = xi/d
    unit = TrapModel(model.kind, u, 1.0, 1.0, 1.0 / model.d_over_xi)
    invert = invert_exact_cubic if model.kind == "cubic" else invert_exact_quartic
    x0 = np.array([invert(xv, av, unit) for xv, av in zip(x1, acc)])
    return TransportSchedule(u, s, x0)


def build_schedule(ansatz, u, model: TrapModel, inversion="perturbative",
                   n: int = DEFAULT_SCHEDULE_SAMPLES) -> TransportSchedule:
    if inversion == "perturbative":
        return invert_harmonic(ansatz, u, n)
    if inversion == "exact":
        return invert_exact(ansatz, u, model, n)
    raise ValueError(f"inversion must be 'perturbative' or 'exact', got {inversion!r}")
