"""Acceptance suite: one PASS/FAIL line per criterion at the stated tolerances.

Run ``pytest tests/test_acceptance.py -v``; the summary lines are printed at the
end of the session.
"""

import math
import time

import numpy as np
import pytest

from anharmonic_sta import classical as C
from anharmonic_sta import protocols as P
from anharmonic_sta import quantum as Q
from anharmonic_sta import traps as T

PI = math.pi
U = 3 * PI
COEFF_TOL = 2e-3


def _timed(fn, *args, **kwargs):
    t0 = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - t0


def test_1_cubic_cosine_coefficients(acceptance):
    ans, dt = _timed(P.solve_cosine_coefficients, U, "cubic")
    _, a1, a2, a3 = ans.coefficients
    err = abs(a1 - P.REFERENCE_COSINE_CUBIC[0])
    c2 = abs(a2 - (-25 / 32 - 1.5 * a1))
    c3 = abs(a3 - (a1 / 2 + 9 / 32))
    ok = err <= COEFF_TOL and c2 <= 1e-12 and c3 <= 1e-12 and dt < 1.0
    acceptance("1", ok, f"a1={a1:.7f} |diff|={err:.2e} constraints {c2:.1e},{c3:.1e} "
                        f"runtime {dt:.2f}s")
    assert ok


def test_2_quartic_cosine_coefficients(acceptance):
    ans, dt = _timed(P.solve_cosine_coefficients, P.QUARTIC_SAFE_U, "quartic")
    a1 = ans.coefficients[1]
    err = abs(a1 - P.REFERENCE_COSINE_QUARTIC[0])
    ok = err <= COEFF_TOL and dt < 1.0
    acceptance("2", ok, f"a1={a1:.7f} vs -0.513628 |diff|={err:.2e} (tol {COEFF_TOL}) "
                        f"runtime {dt:.2f}s")
    assert ok


def test_3_two_parameter_sine(acceptance):
    ans = P.solve_sine_coefficients(U)
    a1, a2 = ans.coefficients
    e1 = abs(a1 - P.REFERENCE_SINE_TWO_PARAM[0])
    e2 = abs(a2 - P.REFERENCE_SINE_TWO_PARAM[1])
    c = abs(1 + 2 * PI * a1 + 4 * PI * a2)
    ok = e1 <= COEFF_TOL and e2 <= COEFF_TOL and c <= 1e-12
    acceptance("3", ok, f"a1={a1:.7f} a2={a2:.7f} diffs {e1:.1e},{e2:.1e} constraint {c:.1e}")
    assert ok


def test_4a_closed_form_f1(acceptance):
    value = P.f1_integral(P.SINE_SINGLE, U, 1.0)
    target = -64 / (567 * PI**2)
    ok = abs(value - target) <= 1e-8
    acceptance("4a", ok, f"f1(1)={value:.12f} target {target:.12f}")
    assert ok


def test_4b_closed_form_df2(acceptance):
    value = P.f_derivative_at_end(P.SINE_SINGLE, U, "quartic")
    target = -256 / (3645 * PI**2)
    ok = abs(value - target) <= 1e-8
    acceptance("4b", ok, f"df2/ds(1)={value:.12f} target {target:.12f}")
    assert ok


def test_5_experimental_boundary_defect(acceptance):
    rep = P.check_boundary_conditions(P.EXPERIMENTAL_SINE)
    v0, v1 = rep.residuals["dx1(0)"], rep.residuals["dx1(1)"]
    ok = v0 == pytest.approx(-0.8, abs=1e-15) and v1 == pytest.approx(-0.8, abs=1e-15)
    acceptance("5", ok, f"dx1(0)={v0!r} dx1(1)={v1!r}")
    assert ok


def test_6_fig2_ordering(acceptance):
    grid = C.default_xi_grid(41)
    t0 = time.perf_counter()
    cos = C.sweep_xi("cubic", P.solve_cosine_coefficients(U), U, grid)
    sin = C.sweep_xi("cubic", P.SINE_SINGLE, U, grid)
    dt = time.perf_counter() - t0
    ratios, mono = [], True
    for res in (cos, sin):
        x, e = res.arrays()
        sel = (x >= 2 - 1e-12) & (x <= 5 + 1e-12)
        mono &= bool(np.all(np.diff(np.abs(e[sel])) <= 0))
    c = {p.log10_xi_over_d: p for p in cos.valid()}
    for p in sin.valid():
        if 2 - 1e-12 <= p.log10_xi_over_d <= 5 + 1e-12 and p.log10_xi_over_d in c:
            ratios.append(abs(c[p.log10_xi_over_d].value) / abs(p.value))
    ok = bool(ratios) and max(ratios) <= 1e-2 and mono and dt < 60
    acceptance("6", ok, f"max |dE_cos|/|dE_sin| = {max(ratios):.2e} over {len(ratios)} points, "
                        f"monotone={mono}, runtime {dt:.1f}s")
    assert ok


@pytest.fixture(scope="module")
def fig4():
    grid_xi = np.logspace(1, 5, 11)
    qgrid = Q.GridSpec.for_transport(T.DEFAULT_D_OVER_A0)
    t0 = time.perf_counter()
    out = {}
    for trap in ("cubic", "quartic"):
        u = U if trap == "cubic" else P.QUARTIC_SAFE_U
        cos = P.solve_cosine_coefficients(u, trap)
        for name, ans in (("cosine", cos), ("sine", P.SINE_SINGLE)):
            out[trap, name] = Q.sweep_fidelity(trap, ans, u, grid_xi, qgrid)
    for name, ans in (("cosine", P.solve_cosine_coefficients(U)), ("sine", P.SINE_SINGLE)):
        model = T.TrapModel.from_oscillator_units("harmonic")
        out["harmonic", name], _ = Q.transport_fidelity(model, T.invert_harmonic(ans, U), qgrid)
    return out, time.perf_counter() - t0


@pytest.mark.slow
def test_7_fig4_ordering(acceptance, fig4):
    out, dt = fig4
    ok = dt < 20 * 60
    parts = []
    for trap in ("cubic", "quartic"):
        cos, sin = out[trap, "cosine"], out[trap, "sine"]
        bad = [f"{c.log10_xi_over_d:g}" for c, s in zip(cos, sin)
               if c.value is None or s.value is None or c.value < s.value]
        ok &= not bad
        parts.append(f"{trap}: cos<sin at log10(xi/d)={','.join(bad) or 'none'}")
        gap = max(abs(out[trap, name][-1].value - out["harmonic", name])
                  for name in ("cosine", "sine"))
        ok &= gap <= 1e-3
        worst = max(1 - c.value for c in cos + sin)
        parts.append(f"{trap} max 1-F={worst:.2e}, |F-F_harmonic| at 1e5={gap:.1e}")
    acceptance("7", ok, "; ".join(parts) + f"; runtime {dt:.0f}s")
    assert ok


def test_8_harmonic_exactness(acceptance):
    model = T.TrapModel.from_oscillator_units("harmonic")
    qgrid = Q.GridSpec.for_transport(model.d_over_a0)
    worst_e, worst_f = 0.0, 1.0
    for ans in (P.solve_cosine_coefficients(U, "cubic"), P.solve_cosine_coefficients(U, "quartic"),
                P.SINE_SINGLE, P.solve_sine_coefficients(U)):
        sched = T.invert_harmonic(ans, U)
        worst_e = max(worst_e, abs(C.residual_energy(C.integrate(model, sched))))
        f, _ = Q.transport_fidelity(model, sched, qgrid)
        worst_f = min(worst_f, f)
    ok = worst_e <= 1e-6 and worst_f >= 0.999
    acceptance("8", ok, f"max classical dE={worst_e:.1e}, min quantum F={worst_f:.12f}")
    assert ok


@pytest.mark.slow
def test_9_numerical_integrity(acceptance):
    checks = {}
    # RK4 order from the end velocity against a fine reference
    ans = P.solve_cosine_coefficients(U)
    model = T.TrapModel.from_oscillator_units("cubic", 3.0)
    sched = T.invert_harmonic(ans, U)
    ref = C.integrate(model, sched, 64000).v[-1]
    err = [abs(C.integrate(model, sched, n).v[-1] - ref) for n in (200, 400, 800)]
    rk = [err[0] / err[1], err[1] / err[2]]
    checks["rk4"] = all(12 <= r <= 20 for r in rk)

    harmonic = T.TrapModel.from_oscillator_units("harmonic")
    hsched = T.invert_harmonic(P.SINE_SINGLE, U)
    qgrid = Q.GridSpec.for_transport(harmonic.d_over_a0)
    _, res = Q.transport_fidelity(harmonic, hsched, qgrid, record_every=200)
    drift = res.norm_drift / qgrid.time_steps
    checks["norm"] = drift <= 1e-12
    traj = C.integrate(harmonic, hsched, qgrid.time_steps)
    idx = np.rint(res.s * qgrid.time_steps).astype(int)
    d = harmonic.d_over_a0
    ehr = np.max(np.abs(res.centroid - d * traj.x[idx])) / d
    checks["ehrenfest"] = ehr <= 1e-4

    cubic = T.TrapModel.from_oscillator_units("cubic", 10.0)
    f0, _ = Q.transport_fidelity(cubic, sched, qgrid)
    ft, _ = Q.transport_fidelity(cubic, sched, Q.GridSpec.for_transport(d, time_steps=40000))
    fx, _ = Q.transport_fidelity(cubic, sched, Q.GridSpec.for_transport(d, points=8192))
    conv = max(abs(f0 - ft), abs(f0 - fx))
    checks["convergence"] = conv <= 1e-6

    worst = 0.0
    for kind, inv in (("cubic", T.invert_exact_cubic), ("quartic", T.invert_exact_quartic)):
        m = T.TrapModel.from_oscillator_units(kind, 2.0)
        for frac in np.linspace(-0.45, 0.45, 19):
            x0 = 0.3 * m.d
            x = x0 + frac * m.xi
            worst = max(worst, abs(inv(x, T.acceleration(m, x, x0), m) - x0) / abs(x0))
    checks["inversion"] = worst <= 1e-10

    ok = all(checks.values())
    acceptance("9", ok, f"rk4 ratios {rk[0]:.1f},{rk[1]:.1f}; norm drift/step {drift:.1e}; "
                        f"fidelity convergence {conv:.1e}; Ehrenfest {ehr:.1e} d; "
                        f"inversion {worst:.1e}")
    assert ok


def test_10_perturbative_scaling(acceptance):
    ans = P.solve_cosine_coefficients(U)
    e = {}
    for lg in (3.0, 4.0):
        model = T.TrapModel.from_oscillator_units("cubic", 10**lg)
        e[lg] = C.residual_energy(C.integrate(model, T.invert_harmonic(ans, U)))
    ratio = e[3.0] / e[4.0]
    expected = 100.0  # (d/xi)^2 over one decade
    ok = expected / 2 <= ratio <= expected * 2
    acceptance("10", ok, f"dE(1e3)/dE(1e4) = {ratio:.3g}, expected {expected:g} within x2")
    assert ok
