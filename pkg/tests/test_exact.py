import math

import numpy as np
import pytest

from pulsrodon.dynsys import monitor_invariants, rhs
from pulsrodon.exact import (
    ellipse_coefficients,
    initial_data,
    solve_omega,
    translation_solve,
)
from pulsrodon.model import (
    ConfigError,
    IntegralSet,
    OmegaCollapse,
    Params,
    SqrtDomain,
    validate_params,
)

P4 = validate_params(Params(m=4.0, f=1.0, nu=1.2))


def make_ints(**kw):
    base = dict(c0=0.0, cI=1.0, cII=-0.2, cIII=4.2, cIV=0.8, cV=float("nan"),
                delta=-4.0, k=float("nan"), nu=1.2, alpha=1.0)
    base.update(kw)
    return IntegralSet(**base)


def harmonic_ints(c0=1.0):
    # delta=0 with cIV**2 = 4*cII*cIII keeps the constants consistent for
    # any f; the amplitude equation collapses to a harmonic oscillator
    return make_ints(c0=c0, cII=0.25, cIII=c0**2, cIV=1.0, delta=0.0)


def test_initial_data_pins_rate_and_offset(main_rt):
    ints = main_rt.ints
    w0 = initial_data(ints, main_rt.p, phi0=0.3, omega_dot_sign=1)
    P2 = (ints.delta**2 + 4.0 * ints.cII) * (ints.alpha * ints.delta + ints.cIII)
    expect = math.sqrt((P2 - (ints.c0 * ints.delta + ints.cIV) ** 2) / ints.delta**2)
    assert w0[0] == 1.0
    assert w0[1] == pytest.approx(expect, rel=1e-15)
    assert w0[2] == 0.3
    P = math.sqrt(P2)
    gap = math.atan2(ints.delta * w0[1] / P,
                     (ints.c0 * ints.delta + ints.cIV) / P)
    assert w0[3] == pytest.approx(0.3 + gap, rel=1e-15)


def test_initial_data_rejects_free_rate_with_delta():
    with pytest.raises(ConfigError):
        initial_data(make_ints(), P4, omega_dot0=0.1)


def test_initial_data_sqrt_domain():
    bad = make_ints(delta=-1.0, cII=-0.2, cIII=0.5, cIV=5.0)
    with pytest.raises(SqrtDomain):
        initial_data(bad, P4)


def test_static_amplitude():
    # f=0, cIII=c0**2, delta=0, zero rate: Omega stays 1
    p0 = validate_params(Params(m=4.0, f=0.0, nu=1.2))
    sol = solve_omega(harmonic_ints(), p0, 5.0, 1e-12)
    for t in np.linspace(0.0, 5.0, 11):
        assert sol.omega(t) == pytest.approx(1.0, abs=1e-12)


def test_harmonic_amplitude_closed_form():
    f = 2.0
    p = validate_params(Params(m=4.0, f=f, nu=1.2))
    sol = solve_omega(harmonic_ints(), p, 1.5, 1e-12, omega_dot0=0.3)
    for t in np.linspace(0.0, 1.5, 16):
        expect = math.cos(f * t / 2.0) + (2.0 * 0.3 / f) * math.sin(f * t / 2.0)
        assert sol.omega(t) == pytest.approx(expect, abs=1e-10)


def test_omega_collapse_on_harmonic_branch():
    f = 2.0
    p = validate_params(Params(m=4.0, f=f, nu=1.2))
    with pytest.raises(OmegaCollapse):
        solve_omega(harmonic_ints(), p, 3.0, 1e-12, omega_dot0=0.3)


def test_build_state_trace_identities(main_rt, main_sol):
    s0 = main_sol.dyn_state(0.0)
    w0 = main_sol.scalar(0.0)
    assert s0.G == pytest.approx(2.0 * w0[1], rel=1e-14)  # u1+v2 = 2*OmegaDot
    ints = main_rt.ints
    for t in (0.0, 2.0, 7.5):
        s = main_sol.dyn_state(t)
        assert s.G_R == pytest.approx(
            ints.c0 / s.Omega**2 - main_rt.p.f / 2.0, abs=1e-14)


def test_rhs_consistency_dense_grid(main_rt, main_sol):
    h = 1e-5
    worst = 0.0
    for t in np.linspace(0.05, 9.95, 41):
        fd = (main_sol.state(t - 2 * h) - 8.0 * main_sol.state(t - h)
              + 8.0 * main_sol.state(t + h) - main_sol.state(t + 2 * h)) / (12.0 * h)
        dy = rhs(main_sol.dyn_state(t), main_rt.p)
        worst = max(worst, float(np.max(np.abs(fd - dy))))
    assert worst < 1e-6


def test_alternate_shear_exponent_fails_consistency(main_rt):
    cfg = main_rt.cfg
    sol = solve_omega(main_rt.prelim_ints, main_rt.p, 2.0, cfg.tol,
                      phi0=cfg.phi0, omega_dot_sign=cfg.omega_dot_sign,
                      v2_exponent=2)
    h = 1e-5
    t = 1.0
    fd = (sol.state(t + h) - sol.state(t - h)) / (2.0 * h)
    dy = rhs(sol.dyn_state(t), main_rt.p)
    assert np.max(np.abs(fd - dy)) > 1e-4


def test_exact_states_conserve_monitored_invariants(main_rt, main_sol):
    rep = monitor_invariants(main_sol, main_rt.p, n=101)
    assert rep.worst_gated_rel() < 1e-7


def test_ellipse_coefficients_reassemble(main_sol):
    for t in (0.0, 1.7, 4.4, 9.3):
        a, b, c = ellipse_coefficients(main_sol, t)
        s = main_sol.dyn_state(t)
        assert a + c == pytest.approx(s.B, abs=1e-13)
        assert b == pytest.approx(s.B_S, abs=1e-13)
        assert a - c == pytest.approx(2.0 * s.B_N, abs=1e-13)


def test_translation_free_motion():
    qbar, pbar, qd, pd = translation_solve(0.0, (0.0, 0.0, 1.0, 0.0), 3.5)
    assert qbar == pytest.approx(3.5, rel=1e-15)
    assert (pbar, qd, pd) == (0.0, 1.0, 0.0)


def test_translation_speed_conserved():
    init = (0.2, -0.1, 0.4, 0.3)
    speed0 = init[2] ** 2 + init[3] ** 2
    for t in np.linspace(0.0, 12.0, 13):
        _, _, qd, pd = translation_solve(1.3, init, t)
        assert qd**2 + pd**2 == pytest.approx(speed0, rel=1e-13)


def test_translation_half_turn():
    # f=1, unit initial horizontal speed, half a rotation period
    qbar, pbar, qd, pd = translation_solve(1.0, (0.0, 0.0, 1.0, 0.0), math.pi)
    assert qd == pytest.approx(-1.0, abs=1e-14)
    assert pd == pytest.approx(0.0, abs=1e-14)
    assert qbar == pytest.approx(0.0, abs=1e-14)
    assert pbar == pytest.approx(-2.0, abs=1e-14)
