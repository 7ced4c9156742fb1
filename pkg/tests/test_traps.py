import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anharmonic_sta import protocols as P
from anharmonic_sta import traps as T

PI = math.pi
U = 3 * PI


@pytest.fixture
def models():
    return {k: T.TrapModel.from_oscillator_units(k, 100.0) for k in T.KINDS}


def test_model_validation():
    with pytest.raises(ValueError):
        T.TrapModel("cubic", 1.0, 1.0, 1.0)  # missing xi
    with pytest.raises(ValueError):
        T.TrapModel("harmonic", -1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        T.TrapModel("sextic", 1.0, 1.0, 1.0, 1.0)


def test_fig2_energy_prefactor():
    model = T.TrapModel.from_oscillator_units("harmonic")
    assert model.energy_scale == pytest.approx(20.2**2, rel=1e-12)
    assert model.energy_scale == pytest.approx(408.04, rel=1e-12)


def test_potential_values(models):
    for m in models.values():
        assert T.potential(m, 3e-7, 3e-7) == 0.0
    cubic, quartic = models["cubic"], models["quartic"]
    k = cubic.mass * cubic.omega0**2
    # nontrivial zero of the cubic well at x - x0 = -3 xi / 2
    assert abs(T.potential(cubic, -1.5 * cubic.xi, 0.0)) <= 1e-14 * k * cubic.xi**2
    assert T.potential(quartic, quartic.xi, 0.0) == pytest.approx(0.75 * k * quartic.xi**2, rel=1e-14)


def test_acceleration_values(models):
    cubic, harmonic = models["cubic"], models["harmonic"]
    for m in models.values():
        assert T.acceleration(m, 1e-6, 1e-6) == 0.0
    w2 = cubic.omega0**2
    # saddle of the cubic trap
    assert abs(T.acceleration(cubic, -cubic.xi, 0.0)) <= 1e-14 * w2 * cubic.xi
    delta = 2.5e-8
    assert T.acceleration(harmonic, delta, 0.0) == pytest.approx(-w2 * delta, rel=1e-15)


@pytest.mark.parametrize("kind", T.KINDS)
def test_force_is_minus_gradient(kind):
    m = T.TrapModel.from_oscillator_units(kind, 3.0)
    h = 1e-8 * (m.xi or m.d)
    for y in np.linspace(-0.4, 0.4, 9) * (m.xi or m.d):
        dv = (T.potential(m, y + h, 0.0) - T.potential(m, y - h, 0.0)) / (2 * h)
        a = T.acceleration(m, y, 0.0)
        assert -dv / m.mass == pytest.approx(a, rel=1e-6, abs=1e-6 * m.omega0**2 * h)


@settings(max_examples=100)
@given(st.floats(-0.49, 0.49), st.sampled_from(["cubic", "quartic"]))
def test_exact_inversion_round_trip(frac, kind):
    m = T.TrapModel.from_oscillator_units(kind, 2.0)
    x0 = 0.3 * m.d
    x = x0 + frac * m.xi
    a = T.acceleration(m, x, x0)
    invert = T.invert_exact_cubic if kind == "cubic" else T.invert_exact_quartic
    assert invert(x, a, m) == pytest.approx(x0, rel=1e-10, abs=1e-10 * m.xi)


def test_harmonic_approaches_anharmonic_for_large_xi():
    for kind in ("cubic", "quartic"):
        m = T.TrapModel.from_oscillator_units(kind, 1e4)
        h = T.TrapModel.from_oscillator_units("harmonic")
        y = np.linspace(-1, 1, 11) * m.d
        rel = np.abs(T.acceleration(m, y, 0.0) - T.acceleration(h, y, 0.0)) / np.maximum(
            np.abs(T.acceleration(h, y, 0.0)), 1e-300)
        assert np.all(rel[y != 0] <= 10 * np.abs(y[y != 0]) / m.xi)


def test_invert_exact_cubic_examples():
    m = T.TrapModel.from_oscillator_units("cubic", 5.0)
    w2, xi = m.omega0**2, m.xi
    x = 1e-7
    assert T.invert_exact_cubic(x, 0.0, m) == x
    assert T.invert_exact_cubic(x, xi * w2 / 4, m) == pytest.approx(x + xi / 2, rel=1e-14)
    x0 = T.invert_exact_cubic(x, 3 * xi * w2 / 16, m)
    assert x0 == pytest.approx(x + xi / 4, rel=1e-14)
    assert T.acceleration(m, x, x0) == pytest.approx(3 * xi * w2 / 16, rel=1e-12)
    with pytest.raises(T.TrapDepthError):
        T.invert_exact_cubic(x, xi * w2, m)


def test_invert_exact_quartic_examples():
    m = T.TrapModel.from_oscillator_units("quartic", 5.0)
    x = 2e-7
    assert T.invert_exact_quartic(x, 0.0, m) == x
    x0 = T.invert_exact_quartic(x, -2 * m.omega0**2 * m.xi, m)
    assert x0 == pytest.approx(x - m.xi, rel=1e-12)


def test_invert_harmonic_sine_single():
    sched = T.invert_harmonic(P.SINE_SINGLE, U, 501)
    s = sched.s
    np.testing.assert_allclose(sched.x0, s - (5 / 9) / (2 * PI) * np.sin(2 * PI * s), atol=1e-15)


def test_invert_harmonic_experimental_matches_reference_trap_path():
    sched = T.invert_harmonic(P.EXPERIMENTAL_SINE, U, 501)
    s = sched.s
    np.testing.assert_allclose(sched.x0, s - np.sin(2 * PI * s) / (2 * PI), atol=1e-15)


@settings(max_examples=30)
@given(st.floats(-2, 2), st.floats(1.0, 40.0))
def test_invert_harmonic_endpoints(a1, u):
    sched = T.invert_harmonic(P.cosine_ansatz(a1), u)
    assert abs(sched.x0[0]) <= 1e-12
    assert abs(sched.x0[-1] - 1.0) <= 1e-12


def test_exact_inversion_schedule_reduces_to_harmonic():
    ans = P.solve_cosine_coefficients(U)
    m = T.TrapModel.from_oscillator_units("cubic", 1e6)
    exact = T.invert_exact(ans, U, m, 201)
    pert = T.invert_harmonic(ans, U, 201)
    np.testing.assert_allclose(exact.x0, pert.x0, atol=1e-6)
    q = T.TrapModel.from_oscillator_units("quartic", 1e3)
    np.testing.assert_allclose(T.invert_exact(ans, U, q, 201).x0, pert.x0, atol=1e-5)


def test_schedule_interpolation_and_validation():
    ans = P.SINE_SINGLE
    sched = T.invert_harmonic(ans, U)
    s = np.linspace(0, 1, 777)
    exact = P.eval_x1(ans, s) + P.eval_ddx1(ans, s) / U**2
    np.testing.assert_allclose(sched(s), exact, atol=1e-11)
    assert sched(-0.1) == pytest.approx(sched(0.0))
    assert sched(1.3) == pytest.approx(sched(1.0))
    with pytest.raises(ValueError):
        T.TransportSchedule(U, np.linspace(0.1, 1, 5), np.zeros(5))
    with pytest.raises(ValueError):
        T.TransportSchedule(U, np.linspace(0, 1, 5), np.array([0, 1, np.nan, 0, 0]))
    with pytest.raises(ValueError):
        T.build_schedule(ans, U, T.TrapModel.from_oscillator_units("harmonic"), "magic")
