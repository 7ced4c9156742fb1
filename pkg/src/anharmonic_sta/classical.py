"""Classical transport in the moving trap and the final residual energy."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import protocols
from .traps import TrapModel, TransportSchedule, build_schedule

DEFAULT_ODE_STEPS = 20_000
ESCAPE_FACTOR = 1.5


class DynamicsError(RuntimeError):
    def __init__(self, message, s=None):
        super().__init__(message)
        self.s = s


class EscapeError(DynamicsError):
    """The particle left the finite cubic well."""


class DivergenceError(DynamicsError):
    pass


@dataclass(frozen=True)
class ClassicalTrajectory:
    s: np.ndarray
    x: np.ndarray
    v: np.ndarray  # dx/ds
    schedule: TransportSchedule
    model: TrapModel
    steps: int

    @property
    def u(self) -> float:
        return self.schedule.u

    def energy_profile(self) -> np.ndarray:
        """Instantaneous energy above the trap bottom, in units of hbar*omega0."""
        return _energy(self.model, self.u, self.x, self.v, self.schedule(self.s))


def _energy(model, u, x, v, x0):
    y = x - x0
    r = model.d_over_xi
    bracket = v**2 / (2 * u**2) + y**2 / 2
    if model.kind == "cubic":
        bracket = bracket + r / 3 * y**3
    elif model.kind == "quartic":
        bracket = bracket + r**2 / 4 * y**4
    return model.energy_scale * bracket


def _force_terms(model):
    r = model.d_over_xi
    if model.kind == "cubic":
        return lambda y: y + r * y * y
    if model.kind == "quartic":
        r2 = r * r
        return lambda y: y + r2 * y * y * y
    return lambda y: y


def integrate(model: TrapModel, schedule: TransportSchedule,
              steps: int = DEFAULT_ODE_STEPS, x_init: float = 0.0,
              v_init: float = 0.0) -> ClassicalTrajectory:
    """Fixed-step RK4 for x'' = -u^2 F(x - x0(s)) starting from rest at x = 0.

    Raises :class:`EscapeError` when ``|x - x0|`` passes 1.5 xi/d in the cubic
    trap.
    """
    if steps < 100:
        raise ValueError("steps must be >= 100")
    u2 = schedule.u**2
    h = 1.0 / steps
    # x0 at every node and midpoint, evaluated once
    x0 = schedule(np.linspace(0.0, 1.0, 2 * steps + 1)).tolist()
    force = _force_terms(model)
    limit = ESCAPE_FACTOR / model.d_over_xi if model.kind == "cubic" else math.inf

    xs = np.empty(steps + 1)
    vs = np.empty(steps + 1)
    x, v = float(x_init), float(v_init)
    xs[0], vs[0] = x, v
    for n in range(steps):
        xa, xm, xb = x0[2 * n], x0[2 * n + 1], x0[2 * n + 2]
        k1x, k1v = v, -u2 * force(x - xa)
        k2x, k2v = v + 0.5 * h * k1v, -u2 * force(x + 0.5 * h * k1x - xm)
        k3x, k3v = v + 0.5 * h * k2v, -u2 * force(x + 0.5 * h * k2x - xm)
        k4x, k4v = v + h * k3v, -u2 * force(x + h * k3x - xb)
        x += h / 6 * (k1x + 2 * k2x + 2 * k3x + k4x)
        v += h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v)
        if not (math.isfinite(x) and math.isfinite(v)):
            raise DivergenceError(f"state became non-finite at s={(n + 1) * h:.6f}",
                                  s=(n + 1) * h)
        if abs(x - xb) > limit:
            raise EscapeError(f"particle escaped the cubic well at s={(n + 1) * h:.6f}",
                              s=(n + 1) * h)
        xs[n + 1], vs[n + 1] = x, v
    s = np.linspace(0.0, 1.0, steps + 1)
    return ClassicalTrajectory(s, xs, vs, schedule, model, steps)


def residual_energy(trajectory: ClassicalTrajectory) -> float:
    """Final residual energy Delta E / (hbar omega0), with x0(1) = 1.

    May be negative in the cubic trap when the particle ends below the trap
    bottom on the shallow side.
    """
    x, v = trajectory.x[-1], trajectory.v[-1]
    return float(_energy(trajectory.model, trajectory.u, x, v, 1.0))


@dataclass(frozen=True)
class SweepPoint:
    log10_xi_over_d: float
    value: float | None
    status: str = "ok"

    @property
    def sign(self) -> int:
        if self.value is None:
            return 0
        return int(np.sign(self.value))


@dataclass(frozen=True)
class EnergySweepResult:
    protocol: str
    kind: str
    u: float
    points: tuple[SweepPoint, ...]

    def valid(self):
        return [p for p in self.points if p.status == "ok"]

    def arrays(self):
        ok = self.valid()
        return (np.array([p.log10_xi_over_d for p in ok]),
                np.array([p.value for p in ok]))


def default_xi_grid(n: int = 41, lo: float = 1.0, hi: float = 5.0) -> np.ndarray:
    return np.logspace(lo, hi, n)


def _energy_point(args):
    kind, ansatz, u, xi_over_d, physical, steps, inversion, n_schedule = args
    model = TrapModel.from_oscillator_units(kind, xi_over_d, **physical)
    log_xi = math.log10(xi_over_d)
    try:
        schedule = build_schedule(ansatz, u, model, inversion, n_schedule)
        traj = integrate(model, schedule, steps)
    except (DynamicsError, ValueError) as exc:
        return SweepPoint(log_xi, None, f"{type(exc).__name__}: {exc}")
    return SweepPoint(log_xi, residual_energy(traj))


def sweep_xi(kind: str, protocol: protocols.ProtocolAnsatz, u: float, xi_over_d_grid,
             physical: dict | None = None, steps: int = DEFAULT_ODE_STEPS,
             inversion: str = "perturbative", n_schedule: int = 2001,
             workers: int = 1) -> EnergySweepResult:
    """Residual energy versus xi/d with the protocol held fixed.

    ``physical`` holds keyword overrides for ``TrapModel.from_oscillator_units``
    (``d_over_a0``, ``omega0``, ``mass``).  Failed points are kept with a
    non-ok status rather than aborting the sweep.
    """
    grid = np.asarray(xi_over_d_grid, dtype=float)
    if grid.size == 0 or np.any(grid <= 0):
        raise ValueError("xi/d grid must be non-empty and positive")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("xi/d grid must be strictly increasing")
    physical = dict(physical or {})
    jobs = [(kind, protocol, u, float(r), physical, steps, inversion, n_schedule)
            for r in grid]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            points = list(pool.map(_energy_point, jobs))
    else:
        points = [_energy_point(j) for j in jobs]
    return EnergySweepResult(protocol.label or protocol.family, kind, u, tuple(points))
