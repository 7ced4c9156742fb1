"""Trigonometric trajectories for the dimensionless mass centre x1(s).

All quantities here are dimensionless: ``s = t/t_f`` in [0, 1], positions in
units of the transport distance ``d`` and ``u = omega0 * t_f``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .numerics import (
    DEFAULT_QUADRATURE,
    QuadratureSpec,
    RootFindSpec,
    find_root,
    integrate,
)

PI = math.pi

FAMILIES = ("cosine_odd", "sine_single", "sine_two_param", "experimental_sine", "custom")
ORDERS = ("cubic", "quartic")

# Published (rounded) coefficients, kept apart from solver output.
REFERENCE_COSINE_CUBIC = (-0.579, 0.08725, -0.00825)
REFERENCE_COSINE_QUARTIC = (-0.513628, -0.0108075, 0.0244358)
REFERENCE_SINE_TWO_PARAM = (0.3135, -0.236348)

QUARTIC_SAFE_U = 3.00001 * PI


class ProtocolError(ValueError):
    pass


class NoSolutionError(ProtocolError):
    """No sign change of the nullification objective on the scanned interval."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class DegeneracyWarning(UserWarning):
    pass


@dataclass(frozen=True)
class ProtocolAnsatz:
    """A trajectory family plus its coefficients.

    ``cosine_odd``: ``(a0, a1, a2, a3)`` for
    ``a0 + a1 cos(pi s) + a2 cos(3 pi s) + a3 cos(5 pi s)``.

    ``sine_two_param``: ``(a1, a2)`` for ``s + a1 sin(2 pi s) + a2 sin(4 pi s)``.

    ``sine_single`` and ``experimental_sine`` take no coefficients.

    ``custom``: ``(c0, c1, b1, b2, ...)`` for
    ``c0 + c1 s + sum_k b_k sin(k pi s)``.
    """

    family: str
    coefficients: tuple[float, ...] = ()
    label: str = ""
    # solver diagnostics, not part of the trajectory
    candidates: tuple[float, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ProtocolError(f"unknown ansatz family {self.family!r}")
        object.__setattr__(self, "coefficients", tuple(float(c) for c in self.coefficients))
        n = len(self.coefficients)
        if self.family == "cosine_odd" and n != 4:
            raise ProtocolError("cosine_odd needs (a0, a1, a2, a3)")
        if self.family == "sine_two_param" and n != 2:
            raise ProtocolError("sine_two_param needs (a1, a2)")
        if self.family in ("sine_single", "experimental_sine") and n:
            raise ProtocolError(f"{self.family} has no free coefficients")
        if self.family == "custom" and n == 0:
            raise ProtocolError("custom ansatz needs at least one coefficient")

    def __call__(self, s):
        return eval_x1(self, s)


def cosine_ansatz(a1: float, label: str = "") -> ProtocolAnsatz:
    """Cosine trajectory with ``a2, a3`` eliminated by the boundary conditions."""
    a2, a3 = cosine_constraint_coefficients(a1)
    return ProtocolAnsatz("cosine_odd", (0.5, a1, a2, a3), label=label)


def cosine_constraint_coefficients(a1: float) -> tuple[float, float]:
    # a1 + a2 + a3 = -1/2 and a1 + 9 a2 + 25 a3 = 0
    return -25.0 / 32.0 - 1.5 * a1, 0.5 * a1 + 9.0 / 32.0


def sine_two_param_ansatz(a1: float, label: str = "") -> ProtocolAnsatz:
    return ProtocolAnsatz("sine_two_param", (a1, sine_constraint_a2(a1)), label=label)


def sine_constraint_a2(a1: float) -> float:
    # 1 + 2 pi a1 + 4 pi a2 = 0
    return -(1.0 + 2.0 * PI * a1) / (4.0 * PI)


SINE_SINGLE = ProtocolAnsatz("sine_single", label="sine")
EXPERIMENTAL_SINE = ProtocolAnsatz("experimental_sine", label="experimental")


def _trig_terms(ansatz: ProtocolAnsatz):
    """Yield (kind, amplitude, angular frequency) plus the linear part (c0, c1)."""
    c = ansatz.coefficients
    fam = ansatz.family
    if fam == "cosine_odd":
        terms = [("cos", c[j], (2 * j - 1) * PI) for j in (1, 2, 3)]
        return (c[0], 0.0), terms
    if fam == "sine_single":
        return (0.0, 1.0), [("sin", -1.0 / (2 * PI), 2 * PI)]
    if fam == "experimental_sine":
        return (0.0, 1.0), [("sin", -9.0 / (10 * PI), 2 * PI)]
    if fam == "sine_two_param":
        return (0.0, 1.0), [("sin", c[0], 2 * PI), ("sin", c[1], 4 * PI)]
    # custom
    c0 = c[0]
    c1 = c[1] if len(c) > 1 else 0.0
    terms = [("sin", b, k * PI) for k, b in enumerate(c[2:], start=1)]
    return (c0, c1), terms


def _check_s(s):
    s = np.asarray(s, dtype=float)
    if np.any((s < 0.0) | (s > 1.0)):
        raise ProtocolError("s must lie in [0, 1]")
    return s


def _evaluate(ansatz, s, order):
    s = _check_s(s)
    (c0, c1), terms = _trig_terms(ansatz)
    if order == 0:
        out = c0 + c1 * s
    elif order == 1:
        out = np.full_like(s, c1)
    else:
        out = np.zeros_like(s)
    for kind, amp, w in terms:
        # derivative of cos/sin cycles with period 4
        phase = {"sin": 0, "cos": 1}[kind] + order
        f = (np.sin, np.cos, lambda x: -np.sin(x), lambda x: -np.cos(x))[phase % 4]
        out = out + amp * w**order * f(w * s)
    return out if out.ndim else float(out)


def eval_x1(ansatz: ProtocolAnsatz, s):
    return _evaluate(ansatz, s, 0)


def eval_dx1(ansatz: ProtocolAnsatz, s):
    return _evaluate(ansatz, s, 1)


def eval_ddx1(ansatz: ProtocolAnsatz, s):
    return _evaluate(ansatz, s, 2)


@dataclass(frozen=True)
class BoundaryReport:
    tolerance: float
    residuals: dict

    @property
    def passed(self) -> dict:
        return {k: abs(v) <= self.tolerance for k, v in self.residuals.items()}

    @property
    def all_passed(self) -> bool:
        return all(self.passed.values())

    def failures(self):
        return [k for k, ok in self.passed.items() if not ok]


def check_boundary_conditions(ansatz: ProtocolAnsatz, tolerance: float = 1e-10) -> BoundaryReport:
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    residuals = {
        "x1(0)": eval_x1(ansatz, 0.0),
        "x1(1)-1": eval_x1(ansatz, 1.0) - 1.0,
        "dx1(0)": eval_dx1(ansatz, 0.0),
        "dx1(1)": eval_dx1(ansatz, 1.0),
        "ddx1(0)": eval_ddx1(ansatz, 0.0),
        "ddx1(1)": eval_ddx1(ansatz, 1.0),
    }
    return BoundaryReport(tolerance, residuals)


def _power_and_prefactor(order):
    if order == "cubic":
        return 2, -1.0
    if order == "quartic":
        return 3, 1.0
    raise ValueError(f"order must be one of {ORDERS}, got {order!r}")


def correction_integral(ansatz, u, s, order, quad: QuadratureSpec = DEFAULT_QUADRATURE):
    """First-order anharmonic displacement f(s) of the mass centre."""
    if u <= 0:
        raise ValueError("u must be positive")
    s = float(_check_s(s))
    power, sign = _power_and_prefactor(order)

    def integrand(sp):
        return eval_ddx1(ansatz, sp) ** power * np.sin(u * (s - sp))

    return sign / u ** (2 * power - 1) * integrate(integrand, 0.0, s, quad)


def f1_integral(ansatz, u, s, quad: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    return correction_integral(ansatz, u, s, "cubic", quad)


def f2_integral(ansatz, u, s, quad: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    return correction_integral(ansatz, u, s, "quartic", quad)


def f_derivative_at_end(ansatz, u, order, quad: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """df/ds at s = 1 for the cubic (f1) or quartic (f2) correction."""
    if u <= 0:
        raise ValueError("u must be positive")
    power, sign = _power_and_prefactor(order)

    def integrand(sp):
        return eval_ddx1(ansatz, sp) ** power * np.cos(u * (1.0 - sp))

    return sign / u ** (2 * power - 2) * integrate(integrand, 0.0, 1.0, quad)


def final_excitation(ansatz, u, order, quad: QuadratureSpec = DEFAULT_QUADRATURE):
    """(f(1), df/ds(1)); both must vanish for zero first-order excitation."""
    return (correction_integral(ansatz, u, 1.0, order, quad),
            f_derivative_at_end(ansatz, u, order, quad))


# Objective scan used to bracket the free coefficient.
SCAN_INTERVAL = (-2.0, 2.0)
SCAN_POINTS = 81
_NULL_RATIO = 1e-9
_MISMATCH_RATIO = 1e-3


def _solve_free_parameter(build, u, order, default_objective, select, quad):
    """Root-find the free coefficient so the first-order final excitation vanishes.

    ``default_objective`` (0 for f(1), 1 for df/ds(1)) is used when both
    conditions are non-trivial at this ``u``; a :class:`DegeneracyWarning` is
    raised if its root does not null the other condition too.
    """
    grid = np.linspace(*SCAN_INTERVAL, SCAN_POINTS)

    def objectives(a):
        f_end, df_end = final_excitation(build(a), u, order, quad)
        # scale f(1) by u so both share the size of a displacement amplitude
        return np.array([u * f_end, df_end])

    values = np.array([objectives(a) for a in grid])
    scale = np.abs(values).max(axis=0)
    trivial = scale <= _NULL_RATIO * scale.max()
    if trivial.all():
        raise NoSolutionError("both final-excitation conditions vanish identically",
                              trace=list(zip(grid, values.tolist())))
    if trivial[0]:
        which = 1
    elif trivial[1]:
        which = 0
    else:
        which = default_objective

    g_scan = values[:, which]
    brackets = [i for i in range(len(grid) - 1)
                if np.sign(g_scan[i]) != np.sign(g_scan[i + 1])]
    if not brackets:
        trace = list(zip(grid.tolist(), g_scan.tolist()))
        raise NoSolutionError(
            f"no sign change of the nullification objective for a1 in {SCAN_INTERVAL}",
            trace=trace)

    def g(a):
        return objectives(a)[which]

    tol = 1e-12 * max(scale[which], 1e-300)
    roots = []
    for i in brackets:
        if g_scan[i] == 0.0:
            roots.append(float(grid[i]))
            continue
        roots.append(find_root(g, RootFindSpec((grid[i], grid[i + 1]), abs_tolerance=tol)))
    roots = sorted(set(roots))
    if select == "largest":
        a1 = max(roots, key=lambda r: (abs(r), r))
    elif select == "smallest":
        a1 = min(roots, key=lambda r: (abs(r), r))
    else:
        a1 = min(roots, key=lambda r: abs(r - float(select)))

    if not trivial.any():
        other = 1 - which
        leftover = abs(objectives(a1)[other])
        if leftover > _MISMATCH_RATIO * scale[other]:
            warnings.warn(
                f"u={u!r}: one free parameter cannot null both f(1) and df/ds(1) "
                f"(remaining {'f(1)' if other == 0 else 'df/ds(1)'} = {leftover:.3e})",
                DegeneracyWarning, stacklevel=3)
    return a1, tuple(roots)


def solve_cosine_coefficients(u: float, order: str = "cubic", select="largest",
                              quad: QuadratureSpec = DEFAULT_QUADRATURE) -> ProtocolAnsatz:
    """Cosine ansatz whose free coefficient nulls the first-order excitation.

    ``select`` picks among several admissible roots: ``"largest"`` or
    ``"smallest"`` magnitude, or a number to take the root nearest to it.
    """
    if u <= 0:
        raise ValueError("u must be positive")
    _power_and_prefactor(order)
    default = 0 if order == "cubic" else 1
    a1, roots = _solve_free_parameter(cosine_ansatz, u, order, default, select, quad)
    a2, a3 = cosine_constraint_coefficients(a1)
    return ProtocolAnsatz("cosine_odd", (0.5, a1, a2, a3),
                          label=f"cosine-{order}", candidates=roots)


def solve_sine_coefficients(u: float, select="largest",
                            quad: QuadratureSpec = DEFAULT_QUADRATURE) -> ProtocolAnsatz:
    """Two-parameter sine ansatz nulling the cubic correction at the final time."""
    if u <= 0:
        raise ValueError("u must be positive")
    a1, roots = _solve_free_parameter(sine_two_param_ansatz, u, "cubic", 0, select, quad)
    return ProtocolAnsatz("sine_two_param", (a1, sine_constraint_a2(a1)),
                          label="sine2", candidates=roots)
