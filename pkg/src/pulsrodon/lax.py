"""Operator-pair (isospectral) formulation of the modulated system.

Rotating the velocity-gradient and ellipse matrices into the half-speed
Coriolis frame and absorbing the amplitude,

    Ltilde = D L D.T + (f/2)*P,   Etilde = D E D.T,
    Lbar = Omega**2 * Ltilde,     Ebar = Omega**(2m) * Etilde,
    Lstar = Lbar - (1/2)tr(Lbar)*I,   Qbar = P @ Ebar,

with P the quarter-turn matrix and D the rotation by f*t/2, turns the
system (for alpha = 1) into the zero-curvature pair in the stretched time
dtau = dt/Omega**2:

    dQbar/dtau + [Qbar, Lstar] = 0,
    dLstar/dtau + [Qbar, P] = 0,

equivalently dM/dtau + [M, Lop] = 0 for Lop = Lstar + lam*P and
M = Qbar + lam*Lstar + lam**2*P at every spectral value lam.  Consequences
checked here: det M is constant in tau for each lam (isospectrality), its
lam**4 coefficient is det P = 1, tr M = 0, and Sigma = 1/Omega obeys an
inverse-cube oscillator equation in tau.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np
from scipy.integrate import solve_ivp

from .model import ConfigError, DynState, Params, StepFailure

__all__ = [
    "P_MATRIX",
    "MatrixPair",
    "gauge_transform",
    "scaled_pair",
    "matrices_at",
    "TauMap",
    "lax_matrices",
    "LaxReport",
    "compatibility_residual",
    "isospectrality",
    "sigma_residual",
    "negative_control",
]

P_MATRIX = np.array([[0.0, -1.0], [1.0, 0.0]])
_I2 = np.eye(2)


@dataclass(frozen=True)
class MatrixPair:
    Lstar: np.ndarray
    Qbar: np.ndarray
    Ebar: np.ndarray


def gauge_transform(L: np.ndarray, E: np.ndarray, f: float, t: float):
    """Rotate both matrices into the half-speed Coriolis frame at time t."""
    c = math.cos(f * t / 2.0)
    s = math.sin(f * t / 2.0)
    D = np.array([[c, -s], [s, c]])
    Ltilde = D @ L @ D.T + (f / 2.0) * P_MATRIX
    Etilde = D @ E @ D.T
    return Ltilde, Etilde


def scaled_pair(Ltilde: np.ndarray, Etilde: np.ndarray, omega: float,
                m: float) -> MatrixPair:
    """Amplitude-scaled, trace-free operator pair."""
    Lbar = omega**2 * Ltilde
    Ebar = omega ** (2.0 * m) * Etilde
    Lstar = Lbar - 0.5 * np.trace(Lbar) * _I2
    return MatrixPair(Lstar=Lstar, Qbar=P_MATRIX @ Ebar, Ebar=Ebar)


def matrices_at(traj, p: Params, t: float) -> MatrixPair:
    s = DynState.from_array(traj.state(t))
    Ltilde, Etilde = gauge_transform(s.gradient_matrix(), s.ellipse_matrix(),
                                     p.f, t)
    return scaled_pair(Ltilde, Etilde, s.Omega, p.m)


def lax_matrices(mp: MatrixPair, lam: float):
    """Spectral-parameter family: Lop = Lstar + lam*P,
    M = Qbar + lam*Lstar + lam**2*P."""
    Lop = mp.Lstar + lam * P_MATRIX
    M = mp.Qbar + lam * mp.Lstar + lam**2 * P_MATRIX
    return Lop, M


class TauMap:
    """Monotone stretched-time map tau(t) = integral of Omega**-2.

    Built by quadrature of the dense trajectory at tight tolerance; the
    inverse is evaluated by Newton iteration with the analytic slope
    dtau/dt = Omega**-2, warm-started from linear interpolation.
    """

    def __init__(self, traj, rtol: float = 1e-12):
        self._traj = traj
        t_end = traj.t_end

        def fun(t, y):
            return [1.0 / traj.omega(t) ** 2]

        sol = solve_ivp(fun, (0.0, t_end), [0.0], method="DOP853",
                        rtol=rtol, atol=rtol * 1e-2, dense_output=True)
        if not sol.success:
            raise StepFailure(sol.message)
        self._dense = sol.sol
        self._ts = sol.t
        self._taus = sol.y[0]
        self.t_end = t_end
        self.tau_end = float(sol.y[0, -1])

    def tau(self, t):
        t = np.asarray(t, dtype=float)
        return self._dense(t)[0] if t.ndim else float(self._dense(t)[0])

    def t_of(self, tau_values) -> np.ndarray:
        tau_values = np.atleast_1d(np.asarray(tau_values, dtype=float))
        t = np.interp(tau_values, self._taus, self._ts)
        for _ in range(6):
            err = np.array([self._dense(tt)[0] for tt in t]) - tau_values
            om = np.array([self._traj.omega(tt) for tt in t])
            t = np.clip(t - err * om**2, 0.0, self.t_end)
        return t


def _tau_sampled(traj, p: Params, n: int):
    """Uniform tau grid over the whole trajectory and the matrices on it."""
    tm = TauMap(traj)
    tau_u = np.linspace(0.0, tm.tau_end, n)
    htau = tau_u[1] - tau_u[0]
    ts = tm.t_of(tau_u)
    Ls = np.empty((n, 2, 2))
    Qs = np.empty((n, 2, 2))
    Es = np.empty((n, 2, 2))
    Oms = np.empty(n)
    for i, t in enumerate(ts):
        mp = matrices_at(traj, p, float(t))
        Ls[i] = mp.Lstar
        Qs[i] = mp.Qbar
        Es[i] = mp.Ebar
        Oms[i] = traj.omega(float(t))
    return htau, Ls, Qs, Es, Oms


def _d5(A: np.ndarray, h: float) -> np.ndarray:
    return (-A[4:] + 8.0 * A[3:-1] - 8.0 * A[1:-3] + A[:-4]) / (12.0 * h)


def _dd5(A: np.ndarray, h: float) -> np.ndarray:
    return (-A[4:] + 16.0 * A[3:-1] - 30.0 * A[2:-2] + 16.0 * A[1:-3] - A[:-4]) / (12.0 * h**2)


def _commutator_stack(X, Y):
    return np.einsum("nij,njk->nik", X, Y) - np.einsum("nij,njk->nik", Y, X)


@dataclass(frozen=True)
class LaxReport:
    pair_q: float
    pair_l: float
    compat: dict
    det_drift: dict
    quartic_coeff_dev: float
    trace_max: float

    @property
    def worst_compat(self) -> float:
        return max(self.compat.values())

    @property
    def worst_det_drift(self) -> float:
        return max(self.det_drift.values())


def _require_unit_alpha(p: Params):
    if p.alpha != 1.0:
        raise ConfigError(
            f"the operator-pair identities require alpha = 1, got {p.alpha:g}")


def compatibility_residual(traj, p: Params, lambdas=(-2.0, -1.0, 0.0, 1.0, 2.0),
                           n: int = 2001) -> LaxReport:
    """Zero-curvature residuals on a uniform tau grid (five-point stencils).

    pair_q and pair_l are the two members of the pair itself; compat[lam]
    is the assembled dM/dtau + [M, Lop] for each spectral value;
    det_drift[lam] the relative drift of det M; quartic_coeff_dev the
    largest deviation of the lam**4 coefficient of det M from 1 (computed
    by a degree-4 fit over the lam sweep); trace_max the largest |tr M|.
    """
    _require_unit_alpha(p)
    htau, Ls, Qs, Es, Oms = _tau_sampled(traj, p, n)
    mid = slice(2, -2)
    Pb = np.broadcast_to(P_MATRIX, Ls[mid].shape)

    r_q = _d5(Qs, htau) + _commutator_stack(Qs[mid], Ls[mid])
    r_l = _d5(Ls, htau) + _commutator_stack(Qs[mid], Pb)
    pair_q = float(np.max(np.abs(r_q)))
    pair_l = float(np.max(np.abs(r_l)))

    compat = {}
    det_drift = {}
    trace_max = 0.0
    det_samples = []
    for lam in lambdas:
        M = Qs + lam * Ls + lam**2 * P_MATRIX
        Lop = Ls + lam * P_MATRIX
        res = _d5(M, htau) + _commutator_stack(M[mid], Lop[mid])
        compat[lam] = float(np.max(np.abs(res)))
        dets = np.linalg.det(M)
        det_samples.append(dets)
        scale = max(abs(dets[0]), 1e-12)
        det_drift[lam] = float(np.max(np.abs(dets - dets[0])) / scale)
        trace_max = max(trace_max, float(np.max(np.abs(np.trace(M, axis1=1, axis2=2)))))

    # lam**4 coefficient of det M from the sweep, at a handful of tau points
    lam_arr = np.array(lambdas, dtype=float)
    dev = 0.0
    if len(lambdas) >= 5:
        det_mat = np.array(det_samples)  # (nlam, n)
        for j in np.linspace(0, n - 1, 7, dtype=int):
            c4 = np.polyfit(lam_arr, det_mat[:, j], 4)[0]
            dev = max(dev, abs(c4 - 1.0))
    return LaxReport(pair_q=pair_q, pair_l=pair_l, compat=compat,
                     det_drift=det_drift, quartic_coeff_dev=float(dev),
                     trace_max=trace_max)


def isospectrality(traj, p: Params, lambdas=(-2.0, -1.0, 0.0, 1.0, 2.0),
                   n: int = 2001) -> dict:
    """Relative drift of det(Qbar + lam*Lstar + lam**2*P) per spectral value."""
    _require_unit_alpha(p)
    _, Ls, Qs, _, _ = _tau_sampled(traj, p, n)
    out = {}
    for lam in lambdas:
        M = Qs + lam * Ls + lam**2 * P_MATRIX
        dets = np.linalg.det(M)
        out[lam] = float(np.max(np.abs(dets - dets[0])) / max(abs(dets[0]), 1e-12))
    return out


def sigma_residual(traj, p: Params, n: int = 2001) -> float:
    """Residual of the inverse-amplitude equation in stretched time:

        Sigma'' + (det Lstar - tr Ebar)*Sigma = f**2/(4*Sigma**3)

    for Sigma = 1/Omega, with Sigma'' from a five-point stencil."""
    _require_unit_alpha(p)
    htau, Ls, _, Es, Oms = _tau_sampled(traj, p, n)
    mid = slice(2, -2)
    Sg = 1.0 / Oms
    Sgpp = _dd5(Sg, htau)
    detL = np.linalg.det(Ls)[mid]
    trE = np.trace(Es, axis1=1, axis2=2)[mid]
    res = Sgpp + (detL - trE) * Sg[mid] - p.f**2 / (4.0 * Sg[mid] ** 3)
    return float(np.max(np.abs(res)))


def negative_control(traj, p: Params, n: int = 2001, rel: float = 0.01) -> float:
    """Largest pair residual after scaling one entry of Qbar by (1 + rel);
    a sound residual evaluator must flag this well above the tolerances."""
    _require_unit_alpha(p)
    htau, Ls, Qs, _, _ = _tau_sampled(traj, p, n)
    mid = slice(2, -2)
    Qc = Qs.copy()
    Qc[:, 0, 0] *= 1.0 + rel
    r = _d5(Qc, htau) + _commutator_stack(Qc[mid], Ls[mid])
    return float(np.max(np.abs(r)))
