import numpy as np
import pytest

from pulsrodon.dynsys import (
    integrate,
    monitor_invariants,
    rhs,
    theorem1_quantities,
)
from pulsrodon.model import DynState, OmegaCollapse, Params, RejectM, validate_params

P4 = validate_params(Params(m=4.0, f=1.0))


def make_state(**kw):
    base = dict(rho0=1.0, B=0.0, B_S=0.0, B_N=0.0, G=0.0, G_N=0.0,
                G_S=0.0, G_R=0.0, Psi_flux=1.0, Omega=1.0)
    base.update(kw)
    return DynState(**base)


def test_rhs_rational_example():
    s = make_state(B=0.5, G=0.2, G_R=0.1)
    dy = rhs(s, P4)
    assert dy[0] == pytest.approx(-3.0 / 5.0, abs=1e-15)
    assert dy[1] == pytest.approx(-2.0 / 5.0, abs=1e-15)
    assert dy[7] == pytest.approx(-3.0 / 25.0, abs=1e-15)


def test_fixed_point_is_constant():
    s0 = make_state()
    traj = integrate(s0, P4, 10.0, 1e-10, samples=51)
    assert np.max(np.abs(traj.states - traj.states[0])) <= 1e-13
    rep = monitor_invariants(traj, P4, n=51)
    assert rep.worst_gated_rel() <= 1e-13


def test_delta_conserved_within_tolerance_budget(main_rt, main_traj):
    # Omega**2 * Bbar (the flux-constraint constant) stays within 10*tol
    rep = monitor_invariants(main_traj, main_rt.p)
    assert rep.row("delta").max_rel_drift < 10.0 * main_rt.cfg.tol


def test_drift_decreases_over_tolerance_decades(main_rt):
    # measured property: coarse-to-fine tolerance decades shrink the worst
    # gated drift monotonically (halving-level granularity is noisy)
    drifts = []
    for tol in (1e-6, 1e-8, 1e-10):
        traj = integrate(main_rt.state0, main_rt.p, 10.0, tol)
        drifts.append(monitor_invariants(traj, main_rt.p).worst_gated_rel())
    assert drifts[0] > drifts[1] > drifts[2]


def test_omega_collapse_detected():
    # without rotation nothing arrests the contraction: G' = -G**2/2 blows
    # down in finite time and Omega follows it through the floor
    p0 = validate_params(Params(m=4.0, f=0.0))
    s0 = make_state(G=-1.0)
    with pytest.raises(OmegaCollapse):
        integrate(s0, p0, 10.0, 1e-10)


def test_theorem1_hand_values():
    s = make_state()
    M, Q, Delta = theorem1_quantities(s, P4)
    assert (M, Q, Delta) == (0.0, 0.0, 0.0)
    s2 = make_state(B=2.0)
    M2, Q2, Delta2 = theorem1_quantities(s2, P4)
    assert M2 == pytest.approx(-1.0, rel=0, abs=0)  # -B*(G_R + f/2)
    assert Delta2 == pytest.approx(1.0, rel=0, abs=0)  # B**2/4


def test_theorem1_rejects_m3():
    p3 = Params(m=3.0, f=1.0)  # bypass validate_params on purpose
    with pytest.raises(RejectM):
        theorem1_quantities(make_state(B=1.0), p3)


def test_theorem1_products_conserved(main_rt, main_traj):
    p = main_rt.p
    ts = np.linspace(0.0, main_traj.t_end, 41)
    vals = []
    for t in ts:
        s = main_traj.dyn_state(t)
        M, Q, Delta = theorem1_quantities(s, p)
        w = s.Omega ** (2.0 * (p.m + 1.0))
        vals.append((M * w, Q * w, Delta * s.Omega ** (4.0 * p.m)))
    vals = np.array(vals)
    for j in range(3):
        col = vals[:, j]
        assert np.max(np.abs(col - col[0])) / abs(col[0]) < 1e-6


def test_monitor_reports_cv_ungated(main_rt, main_traj):
    rep = monitor_invariants(main_traj, main_rt.p)
    row = rep.row("cV")
    assert not row.gated
    assert row.max_rel_drift > 1e-3  # it genuinely drifts


def test_trajectory_dense_matches_samples(main_traj):
    ts, ys = main_traj.sample(17)
    for t, y in zip(ts, ys):
        np.testing.assert_allclose(main_traj.state(t), y, rtol=0, atol=1e-12)
