"""Shared numerical kernels: composite Gauss-Legendre quadrature, bracketed
root finding and the real root of a depressed cubic."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize


class NumericsError(Exception):
    pass


class IntegrationError(NumericsError):
    pass


class BracketError(NumericsError):
    pass


class ConvergenceError(NumericsError):
    pass


class AmbiguousRootError(NumericsError):
    pass


_SCHEMES = {"gauss3": 3, "gauss5": 5, "gauss8": 8}


@dataclass(frozen=True)
class QuadratureSpec:
    """Composite Gauss-Legendre rule.

    ``node_count`` is the number of equal panels; ``scheme`` picks the number
    of Legendre nodes per panel (``gauss5`` is exact for degree-9 polynomials).
    """

    node_count: int = 2000
    scheme: str = "gauss5"

    def __post_init__(self):
        if self.node_count < 2:
            raise ValueError("node_count must be >= 2")
        if self.scheme not in _SCHEMES:
            raise ValueError(f"unknown quadrature scheme {self.scheme!r}")

    @property
    def points_per_panel(self) -> int:
        return _SCHEMES[self.scheme]

    @property
    def exactness_degree(self) -> int:
        return 2 * self.points_per_panel - 1


@dataclass(frozen=True)
class RootFindSpec:
    bracket: tuple[float, float]
    abs_tolerance: float = 1e-12
    max_iterations: int = 200

    def __post_init__(self):
        if self.abs_tolerance <= 0:
            raise ValueError("abs_tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")
        lo, hi = self.bracket
        if not lo < hi:
            raise ValueError("bracket must be an ordered pair")


DEFAULT_QUADRATURE = QuadratureSpec()


def quadrature_nodes(a: float, b: float, spec: QuadratureSpec = DEFAULT_QUADRATURE):
    """Return flattened (nodes, weights) of the composite rule on [a, b]."""
    x, w = np.polynomial.legendre.leggauss(spec.points_per_panel)
    edges = np.linspace(a, b, spec.node_count + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def integrate(f, a: float, b: float, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Integrate a vectorised function ``f`` over [a, b].

    ``f`` is called once with the array of all abscissae.
    """
    if a > b:
        raise ValueError(f"integration bounds out of order: a={a} > b={b}")
    if a == b:
        return 0.0
    nodes, weights = quadrature_nodes(a, b, spec)
    values = np.broadcast_to(np.asarray(f(nodes), dtype=float), nodes.shape)
    bad = ~np.isfinite(values)
    if bad.any():
        x_bad = nodes[np.argmax(bad)]
        raise IntegrationError(f"integrand is not finite at x={x_bad!r}")
    return float(np.dot(weights, values))


def find_root(g, spec: RootFindSpec) -> float:
    """Bracketed root of a scalar function (Brent's bisection/secant hybrid).

    The returned point satisfies ``|g(x)| <= spec.abs_tolerance``.
    """
    lo, hi = spec.bracket
    g_lo, g_hi = g(lo), g(hi)
    if g_lo == 0.0:
        return float(lo)
    if g_hi == 0.0:
        return float(hi)
    if np.sign(g_lo) == np.sign(g_hi):
        raise BracketError(f"no sign change on [{lo}, {hi}]: g={g_lo!r}, {g_hi!r}")
    try:
        x = optimize.brentq(g, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps,
                            maxiter=spec.max_iterations)
    except RuntimeError as exc:
        raise ConvergenceError(str(exc)) from exc
    residual = g(x)
    if abs(residual) > spec.abs_tolerance:
        raise ConvergenceError(
            f"root at x={x!r} leaves |g|={abs(residual):.3e} > {spec.abs_tolerance:.1e}")
    return float(x)


def real_cubic_root(p: float, q: float) -> float:
    """Unique real root of y**3 + p*y + q = 0."""
    if p == 0.0:
        y = -math.copysign(abs(q) ** (1.0 / 3.0), q)
    elif p > 0.0:
        r = math.sqrt(p / 3.0)
        y = -2.0 * r * math.sinh(math.asinh(1.5 * q / (p * r)) / 3.0)
    else:
        disc = 4.0 * p**3 + 27.0 * q**2
        if disc <= 0.0:
            raise AmbiguousRootError(f"y^3 + {p}*y + {q} has three real roots")
        r = math.sqrt(-p / 3.0)
        arg = 1.5 * abs(q) / (-p * r)
        y = -math.copysign(2.0 * r * math.cosh(math.acosh(arg) / 3.0), q)
    # one Newton polish
    dy = 3.0 * y * y + p
    if dy != 0.0:
        y -= (y**3 + p * y + q) / dy
    return y
