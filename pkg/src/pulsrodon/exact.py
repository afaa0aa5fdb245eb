"""Construction of the multi-parameter solutions on the constrained branch.

The constrained branch holds delta = Omega**(2m+2)*B constant, closing the
system to one scalar amplitude equation plus two angle quadratures:

    OmegaDotDot = -f**2*Omega/4 + (c0**2 - cIII)/Omega**3 - 2*alpha*delta/Omega**5
    phiDot      = f + (2/Omega**2)*(delta*num/(delta**2 + 4*cII*Omega**4) - c0)
    thetaDot    = f - (alpha/Omega**2)*num/(alpha*delta + cIII*Omega**2)

with num = c0*delta + cIV*Omega**2.  From (Omega, OmegaDot, phi, theta) the
full ten-component state is rebuilt in closed form and the ellipse
translation follows a rigid rotation at the Coriolis frequency.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import solve_ivp

from . import kernels
from .model import (
    DynState,
    IntegralSet,
    OmegaCollapse,
    Params,
    SqrtDomain,
    StepFailure,
    ConfigError,
)
from .reduced import omega_first_integral_residual

__all__ = [
    "ExactSolution",
    "initial_data",
    "solve_omega",
    "build_state",
    "ellipse_coefficients",
    "translation_solve",
]


def initial_data(ints: IntegralSet, p: Params, *, phi0: float = 0.0,
                 omega_dot_sign: int = 1, omega_dot0: float | None = None,
                 theta0: float | None = None) -> np.ndarray:
    """Scalar initial data (Omega, OmegaDot, phi, theta) at t=0, Omega(0)=1.

    With delta != 0 the amplitude rate and the angle offset theta - phi are
    pinned by the first integral and the invariant algebra:

        P(Omega)**2 = (delta**2 + 4*cII*Omega**4)*(alpha*delta + cIII*Omega**2)
        OmegaDot**2 = (P(1)**2 - (c0*delta + cIV)**2) / delta**2
        sin(theta-phi) = delta*OmegaDot*Omega**2/P
        cos(theta-phi) = Omega*(c0*delta + cIV*Omega**2)/P

    omega_dot_sign (+1 or -1) picks the branch of the square root.  With
    delta == 0 the constraint degenerates: omega_dot0 must be given
    (default 0.0) and theta0 defaults to phi0.
    """
    d = ints.delta
    if d == 0.0:
        omd = 0.0 if omega_dot0 is None else float(omega_dot0)
        th0 = phi0 if theta0 is None else float(theta0)
        return np.array([1.0, omd, phi0, th0])
    if omega_dot0 is not None:
        raise ConfigError("omega_dot0 may only be supplied when delta == 0; "
                          "otherwise the first integral fixes it")
    p1 = d**2 + 4.0 * ints.cII
    p2 = ints.alpha * d + ints.cIII
    psq = p1 * p2
    if psq < 0.0:
        raise SqrtDomain("amplitude-rate envelope P**2 at Omega=1", psq)
    num0 = ints.c0 * d + ints.cIV
    omd_sq = (psq - num0**2) / d**2
    if omd_sq < 0.0:
        raise SqrtDomain("OmegaDot(0)**2", omd_sq)
    omd = (1 if omega_dot_sign >= 0 else -1) * math.sqrt(omd_sq)
    P = math.sqrt(psq)
    offset = math.atan2(d * omd / P, num0 / P)
    if theta0 is not None:
        raise ConfigError("theta0 may only be supplied when delta == 0; "
                          "otherwise the angle offset is fixed")
    return np.array([1.0, omd, phi0, phi0 + offset])


class ExactSolution:
    """Dense closed-branch solution.

    scalar(t) returns (Omega, OmegaDot, phi, theta); state(t) the rebuilt
    ten-component array (layout model.STATE_FIELDS); translation(t) the
    ellipse centre and its velocity.  sample(n) mirrors the Trajectory
    interface so the invariant monitor and the operator-pair checks accept
    either object.
    """

    def __init__(self, ints: IntegralSet, p: Params, dense, times, tol: float,
                 translation_init, first_integral_residual: float,
                 v2_exponent: int):
        self.ints = ints
        self.params = p
        self.times = times
        self.tol = tol
        self.translation_init = tuple(float(v) for v in translation_init)
        self.first_integral_residual = first_integral_residual
        self.v2_exponent = v2_exponent
        self._dense = dense

    @property
    def t_end(self) -> float:
        return float(self.times[-1])

    def scalar(self, t):
        return self._dense(t)

    def omega(self, t: float) -> float:
        return float(self._dense(t)[0])

    def state(self, t: float) -> np.ndarray:
        return build_state(self, t).as_array()

    def dyn_state(self, t: float) -> DynState:
        return build_state(self, t)

    def translation(self, t):
        return translation_solve(self.params.f, self.translation_init, t)

    def sample(self, n: int):
        ts = np.linspace(self.times[0], self.times[-1], n)
        return ts, np.array([self.state(t) for t in ts])


def solve_omega(ints: IntegralSet, p: Params, t_end: float, tol: float, *,
                phi0: float = 0.0, omega_dot_sign: int = 1,
                omega_dot0: float | None = None, theta0: float | None = None,
                translation_init=(0.0, 0.0, 0.0, 0.0), samples: int = 201,
                v2_exponent: int = 3) -> ExactSolution:
    """Integrate the scalar amplitude-and-angles system over [0, t_end].

    The quartic first integral is evaluated at every accepted step and its
    largest residual stored on the result (nan when delta == 0, where the
    integral degenerates).  v2_exponent selects the amplitude power in one
    shear entry of the velocity rebuild; 3 is the value consistent with
    G = 2*OmegaDot/Omega, the variant 2 is kept for the consistency tests
    that demonstrate it fails.
    """
    if p.branch != "constrained":
        raise ConfigError("closed-branch construction requires branch='constrained'")
    if v2_exponent not in (2, 3):
        raise ConfigError(f"v2_exponent must be 2 or 3, got {v2_exponent}")
    w0 = initial_data(ints, p, phi0=phi0, omega_dot_sign=omega_dot_sign,
                      omega_dot0=omega_dot0, theta0=theta0)
    f, alpha = p.f, ints.alpha
    c0, cII, cIII, cIV, d = ints.c0, ints.cII, ints.cIII, ints.cIV, ints.delta
    out = np.empty(4)

    def fun(t, w):
        kernels.rhs_exact_scalar(w, f, alpha, c0, cII, cIII, cIV, d, out)
        return out.copy()

    def floor_event(t, w):
        return w[0] - 1e-8

    floor_event.terminal = True
    floor_event.direction = -1.0

    sol = solve_ivp(
        fun, (0.0, t_end), w0, method="DOP853", rtol=tol, atol=tol * 1e-2,
        dense_output=True, t_eval=np.linspace(0.0, t_end, samples),
        events=floor_event,
    )
    if sol.status == 1:
        raise OmegaCollapse(float(sol.t_events[0][0]))
    if not sol.success:
        raise StepFailure(sol.message)

    if d == 0.0:
        fi_res = float("nan")
    else:
        steps = sol.sol.ts if hasattr(sol.sol, "ts") else sol.t
        res = [abs(omega_first_integral_residual(w[0], w[1], ints))
               for w in (sol.sol(t) for t in steps)]
        fi_res = float(max(res))
    return ExactSolution(ints, p, sol.sol, sol.t, tol, translation_init,
                         fi_res, v2_exponent)


def build_state(sol: ExactSolution, t: float) -> DynState:
    """Rebuild the ten-component state from the scalar solution at time t.

    The ellipse part comes from the angle parametrization, the velocity
    part from the two-by-two factor decomposition whose entries are

        u1 = OmegaDot/Omega + r2*cos(theta)/Omega**3
        v1 = c0/Omega**2 - f/2 - r2*sin(theta)/Omega**3
        u2 = -c0/Omega**2 + f/2 - r2*sin(theta)/Omega**3
        v2 = OmegaDot/Omega - r2*cos(theta)/Omega**v2_exponent

    with r2 = sqrt(alpha*delta + cIII*Omega**2); the exponent 3 in v2 is
    forced by G = u1 + v2 = 2*OmegaDot/Omega.
    """
    ints, p = sol.ints, sol.params
    Om, Omd, phi, theta = sol.scalar(t)
    m, f = p.m, p.f
    d = ints.delta
    Bb = d / Om**2

    r1sq = ints.cII + Bb**2 / 4.0
    if r1sq < 0.0:
        raise SqrtDomain("ellipse radius r1**2", r1sq)
    r2sq = ints.alpha * d + ints.cIII * Om**2
    if r2sq < 0.0:
        raise SqrtDomain("deformation radius r2**2", r2sq)
    r1 = math.sqrt(r1sq)
    r2 = math.sqrt(r2sq)

    BbS = -r1 * math.cos(phi)
    BbN = -r1 * math.sin(phi)
    u1 = Omd / Om + r2 * math.cos(theta) / Om**3
    v1 = ints.c0 / Om**2 - f / 2.0 - r2 * math.sin(theta) / Om**3
    u2 = -ints.c0 / Om**2 + f / 2.0 - r2 * math.sin(theta) / Om**3
    v2 = Omd / Om - r2 * math.cos(theta) / Om**sol.v2_exponent

    return DynState(
        rho0=ints.cI / Om ** (2.0 * (m - 1.0)),
        B=d / Om ** (2.0 * m + 2.0),
        B_S=BbS / Om ** (2.0 * m),
        B_N=BbN / Om ** (2.0 * m),
        G=u1 + v2,
        G_N=(u1 - v2) / 2.0,
        G_S=(u2 + v1) / 2.0,
        G_R=(v1 - u2) / 2.0,
        Psi_flux=ints.nu * Om ** (2.0 * (m - 1.0)),
        Omega=Om,
    )


def ellipse_coefficients(sol: ExactSolution, t: float) -> tuple[float, float, float]:
    """Entries (a, b, c) of the density quadratic-form matrix [[a, b], [b, c]].

        a = (delta - R*sin(phi)) / (2*Omega**(2m+2))
        b = -R*cos(phi) / (2*Omega**(2m+2))
        c = (delta + R*sin(phi)) / (2*Omega**(2m+2))

    with R = sqrt(4*cII*Omega**4 + delta**2).  These agree identically with
    the matrix assembled from (B, B_S, B_N): a + c = B, b = B_S and
    a - c = 2*B_N; the sign of b and the half in c are pinned by that
    agreement.
    """
    ints, p = sol.ints, sol.params
    Om = sol.omega(t)
    _, _, phi, _ = sol.scalar(t)
    Rsq = 4.0 * ints.cII * Om**4 + ints.delta**2
    if Rsq < 0.0:
        raise SqrtDomain("ellipse discriminant R**2", Rsq)
    R = math.sqrt(Rsq)
    denom = 2.0 * Om ** (2.0 * p.m + 2.0)
    a = (ints.delta - R * math.sin(phi)) / denom
    b = -R * math.cos(phi) / denom
    c = (ints.delta + R * math.sin(phi)) / denom
    return a, b, c


def translation_solve(f: float, init, t):
    """Ellipse-centre motion: qbarDotDot = f*pbarDot, pbarDotDot = -f*qbarDot.

    init = (qbar0, pbar0, qbar_dot0, pbar_dot0).  The velocity rotates
    rigidly, w(t) = w(0)*exp(-i*f*t) for w = qbar_dot + i*pbar_dot, so the
    centre traces a circle (a straight line when f = 0).  t may be a scalar
    or an array; returns (qbar, pbar, qbar_dot, pbar_dot) with t's shape.
    """
    q0, p0, qd0, pd0 = (float(v) for v in init)
    t = np.asarray(t, dtype=float)
    w0 = complex(qd0, pd0)
    if f == 0.0:
        q = q0 + qd0 * t
        pp = p0 + pd0 * t
        qd = np.full_like(t, qd0)
        pd = np.full_like(t, pd0)
        return q, pp, qd, pd
    rot = np.exp(-1j * f * t)
    w = w0 * rot
    z = complex(q0, p0) - 1j * w0 * (1.0 - rot) / f
    return z.real, z.imag, w.real, w.imag
