"""Split-operator wave-packet transport in harmonic-oscillator units.

Lengths are in a0 = sqrt(hbar/(m omega0)), times in 1/omega0 and energies in
hbar*omega0, so the Hamiltonian is -1/2 d^2/dx^2 + V(x, t).
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .traps import TrapModel, TransportSchedule, build_schedule

DEFAULT_POINTS = 4096
DEFAULT_TIME_STEPS = 20_000
DEFAULT_PADDING = 15.0
MIN_PADDING = 12.0
LEAKAGE_LIMIT = 1e-3
CLAMP_FACTOR = 1.5


class GridError(ValueError):
    pass


class QuantumDivergenceError(RuntimeError):
    pass


class LeakageWarning(UserWarning):
    pass


@dataclass(frozen=True)
class GridSpec:
    x_min: float
    x_max: float
    points: int = DEFAULT_POINTS
    time_steps: int = DEFAULT_TIME_STEPS

    def __post_init__(self):
        if not self.x_max > self.x_min:
            raise GridError("grid extent must be increasing")
        if self.points < 512 or self.points & (self.points - 1):
            raise GridError(f"point count must be a power of two >= 512, got {self.points}")
        if self.time_steps < 1:
            raise GridError("time_steps must be positive")

    @classmethod
    def for_transport(cls, d_over_a0, points=DEFAULT_POINTS, time_steps=DEFAULT_TIME_STEPS,
                      padding=DEFAULT_PADDING):
        return cls(-padding, d_over_a0 + padding, points, time_steps)

    @property
    def x(self) -> np.ndarray:
        # periodic grid: the right endpoint is not a separate sample
        return self.x_min + self.dx * np.arange(self.points)

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.points

    @property
    def k(self) -> np.ndarray:
        return 2 * np.pi * np.fft.fftfreq(self.points, d=self.dx)

    def check_covers(self, d_over_a0: float, padding: float = MIN_PADDING):
        if self.x_min > -padding or self.x_max < d_over_a0 + padding:
            raise GridError(
                f"grid [{self.x_min}, {self.x_max}] must span [-{padding}, "
                f"{d_over_a0} + {padding}] a0")


@dataclass
class WavePacket:
    grid: GridSpec
    psi: np.ndarray

    def norm(self) -> float:
        return float(np.sum(np.abs(self.psi) ** 2) * self.grid.dx)

    def normalized(self) -> WavePacket:
        return WavePacket(self.grid, self.psi / math.sqrt(self.norm()))

    def density(self) -> np.ndarray:
        return np.abs(self.psi) ** 2

    def mean_position(self) -> float:
        rho = self.density()
        return float(np.sum(self.grid.x * rho) / np.sum(rho))

    def variance(self) -> float:
        rho = self.density()
        mean = np.sum(self.grid.x * rho) / np.sum(rho)
        return float(np.sum((self.grid.x - mean) ** 2 * rho) / np.sum(rho))


def harmonic_ground_state(grid: GridSpec, center: float = 0.0,
                          padding: float = MIN_PADDING) -> WavePacket:
    """Normalized ground state of the unit harmonic trap centred at ``center``."""
    if center - padding < grid.x_min or center + padding > grid.x_max:
        raise GridError(f"centre {center} is within {padding} a0 of the grid edge")
    x = grid.x - center
    psi = np.pi ** -0.25 * np.exp(-0.5 * x**2)
    return WavePacket(grid, psi.astype(complex)).normalized()


def fidelity(psi: WavePacket, phi: WavePacket) -> float:
    if psi.grid != phi.grid:
        raise GridError("fidelity needs wave packets on identical grids")
    overlap = np.vdot(psi.psi, phi.psi) * psi.grid.dx
    return float(abs(overlap) ** 2)


def trap_potential(model: TrapModel, y: np.ndarray) -> np.ndarray:
    """V(y) in units of hbar*omega0 with y = x - x0 in units of a0.

    The cubic potential is held at its saddle value for y < -1.5 xi, where it
    would otherwise fall without bound.
    """
    v = 0.5 * y**2
    if model.kind == "cubic":
        xi = model.xi / model.a0
        v = v + y**3 / (3.0 * xi)
        v = np.where(y < -CLAMP_FACTOR * xi, xi**2 / 6.0, v)
    elif model.kind == "quartic":
        xi = model.xi / model.a0
        v = v + 0.25 * y**4 / xi**2
    return v


@dataclass
class Evolution:
    """Final state plus diagnostics recorded during propagation."""

    psi: WavePacket
    s: np.ndarray  # sample times (fraction of t_f) of the recorded observables
    centroid: np.ndarray
    norm: np.ndarray
    edge_probability: float
    snapshots: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    @property
    def norm_drift(self) -> float:
        return float(np.max(np.abs(self.norm - self.norm[0])))


def propagate(psi: WavePacket, potential_at, duration: float, steps: int,
              record_every: int = 0, snapshot_s=(), edge_band: float = 0.1) -> Evolution:
    """Strang splitting: half potential kick, exact kinetic step, half kick.

    ``potential_at(t)`` returns V on the grid at time ``t``; it is sampled at
    the midpoint of each step.
    """
    grid = psi.grid
    dt = duration / steps
    kinetic = np.exp(-0.5j * dt * grid.k**2)
    x = grid.x
    n_edge = max(1, int(edge_band * grid.points / 2))

    snap_steps = {int(round(s * steps)): s for s in snapshot_s}
    snapshots = {}
    rec_s, rec_c, rec_n = [], [], []

    def record(n, wave):
        rho = np.abs(wave) ** 2
        total = rho.sum()
        rec_s.append(n / steps)
        rec_c.append(float(np.dot(x, rho) / total))
        rec_n.append(float(total * grid.dx))

    wave = psi.psi.astype(complex)
    edge = 0.0
    record(0, wave)
    if 0 in snap_steps:
        snapshots[snap_steps[0]] = np.abs(wave) ** 2
    half = np.exp(-0.5j * dt * potential_at(0.5 * dt))
    wave = wave * half
    for n in range(steps):
        wave = np.fft.ifft(kinetic * np.fft.fft(wave))
        last = n == steps - 1
        if last:
            wave = wave * half
        else:
            nxt = np.exp(-0.5j * dt * potential_at((n + 1.5) * dt))
            out = n + 1
            if (record_every and out % record_every == 0) or out in snap_steps:
                # observables need the state at a full step, not mid-kick
                full = wave * half
                if record_every and out % record_every == 0:
                    record(out, full)
                if out in snap_steps:
                    snapshots[snap_steps[out]] = np.abs(full) ** 2
                wave = full * nxt
            else:
                wave = wave * (half * nxt)
            half = nxt
        if not np.all(np.isfinite(wave[:: max(1, grid.points // 64)])):
            raise QuantumDivergenceError(f"wave function diverged at step {n + 1}")
    if not np.all(np.isfinite(wave)):
        raise QuantumDivergenceError("wave function is not finite after propagation")
    rho = np.abs(wave) ** 2
    edge = float((rho[:n_edge].sum() + rho[-n_edge:].sum()) * grid.dx)
    if not rec_s or rec_s[-1] != 1.0:
        record(steps, wave)
    if steps in snap_steps:
        snapshots[snap_steps[steps]] = rho
    result = Evolution(WavePacket(grid, wave), np.array(rec_s), np.array(rec_c),
                       np.array(rec_n), edge, snapshots)
    loss = max(abs(1.0 - result.norm[-1] / result.norm[0]), edge)
    if loss > LEAKAGE_LIMIT:
        msg = f"probability {loss:.3e} lost or at the grid edge"
        result.warnings.append(msg)
        warnings.warn(msg, LeakageWarning, stacklevel=2)
    return result


def evolve(psi: WavePacket, model: TrapModel, schedule: TransportSchedule,
           t_f: float | None = None, record_every: int = 0, snapshot_s=()) -> Evolution:
    """Transport ``psi`` through the moving trap over ``t_f`` seconds.

    ``t_f`` defaults to ``u / omega0`` from the schedule.
    """
    if t_f is None:
        t_f = schedule.u / model.omega0
    duration = model.omega0 * t_f
    d = model.d_over_a0
    grid = psi.grid
    steps = grid.time_steps
    dt = duration / steps
    # trap centre at every half step, in a0
    centres = d * schedule(np.arange(2 * steps + 2) * (0.5 * dt) / duration)
    x = grid.x

    def potential_at(t):
        return trap_potential(model, x - centres[int(round(2 * t / dt))])

    return propagate(psi, potential_at, duration, steps, record_every, snapshot_s)


def transport_fidelity(model: TrapModel, schedule: TransportSchedule, grid: GridSpec,
                       t_f: float | None = None, **kwargs):
    """Fidelity with the harmonic ground state displaced by ``d``."""
    d = model.d_over_a0
    grid.check_covers(d)
    psi0 = harmonic_ground_state(grid, 0.0)
    result = evolve(psi0, model, schedule, t_f, **kwargs)
    target = harmonic_ground_state(grid, d)
    return fidelity(target, result.psi), result


@dataclass(frozen=True)
class FidelityPoint:
    log10_xi_over_d: float
    value: float | None
    status: str = "ok"
    warning: str = ""


def _fidelity_point(args):
    kind, ansatz, u, xi_over_d, grid, physical, inversion, n_schedule = args
    model = TrapModel.from_oscillator_units(kind, xi_over_d, **physical)
    log_xi = math.log10(xi_over_d) if xi_over_d else math.nan
    try:
        schedule = build_schedule(ansatz, u, model, inversion, n_schedule)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", LeakageWarning)
            f, result = transport_fidelity(model, schedule, grid)
    except (RuntimeError, ValueError) as exc:
        return FidelityPoint(log_xi, None, f"{type(exc).__name__}: {exc}")
    return FidelityPoint(log_xi, f, "ok", "; ".join(result.warnings))


def sweep_fidelity(kind, protocol, u, xi_over_d_grid, grid: GridSpec | None = None,
                   physical: dict | None = None, inversion: str = "perturbative",
                   n_schedule: int = 2001, workers: int = 1):
    """Transport fidelity for each xi/d; returns a list of :class:`FidelityPoint`."""
    physical = dict(physical or {})
    values = np.asarray(xi_over_d_grid, dtype=float)
    if values.size == 0 or np.any(values <= 0):
        raise ValueError("xi/d grid must be non-empty and positive")
    if grid is None:
        d = TrapModel.from_oscillator_units("harmonic", **physical).d_over_a0
        grid = GridSpec.for_transport(d)
    jobs = [(kind, protocol, u, float(r), grid, physical, inversion, n_schedule)
            for r in values]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            return list(pool.map(_fidelity_point, jobs))
    return [_fidelity_point(j) for j in jobs]
