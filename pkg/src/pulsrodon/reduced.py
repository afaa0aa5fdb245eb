"""The modulated seven-component system and its angle parametrization.

Modulated variables absorb the amplitude:

    Bbar   = Omega**(2m) * B      (same for Bbar_S, Bbar_N)
    Gbar_S = Omega**2 * G_S       (same for Gbar_N)

with rho0, Psi_flux, G and G_R recovered from the constants cI, nu and c0.
On the constrained branch delta = Omega**2 * Bbar = Omega**(2m+2) * B is
held constant, which closes the system to the scalar amplitude equation

    OmegaDotDot + f**2*Omega/4 = (c0**2 - cIII)/Omega**3 - 2*alpha*delta/Omega**5

plus two angle quadratures.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np
from scipy.integrate import solve_ivp

from . import kernels
from .model import (
    DenomZero,
    DynState,
    IntegralSet,
    OmegaCollapse,
    Params,
    StepFailure,
)

__all__ = [
    "ModState",
    "to_modulated",
    "from_modulated",
    "modulated_rhs",
    "integrate_modulated",
    "integrals",
    "parametrize",
    "angle_rhs",
    "omega_first_integral_residual",
    "k_form_residual",
]

MOD_FIELDS = ("Bbar", "Bbar_S", "Bbar_N", "Gbar_S", "Gbar_N", "Omega", "OmegaDot")


@dataclass(frozen=True)
class ModState:
    Bbar: float
    Bbar_S: float
    Bbar_N: float
    Gbar_S: float
    Gbar_N: float
    Omega: float
    OmegaDot: float

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, n) for n in MOD_FIELDS])

    @classmethod
    def from_array(cls, z) -> "ModState":
        return cls(*(float(v) for v in z))


def to_modulated(s: DynState, p: Params) -> ModState:
    m = p.m
    Om = s.Omega
    return ModState(
        Bbar=Om ** (2.0 * m) * s.B,
        Bbar_S=Om ** (2.0 * m) * s.B_S,
        Bbar_N=Om ** (2.0 * m) * s.B_N,
        Gbar_S=Om**2 * s.G_S,
        Gbar_N=Om**2 * s.G_N,
        Omega=Om,
        OmegaDot=s.G * Om / 2.0,
    )


def from_modulated(z: ModState, ints: IntegralSet, p: Params) -> DynState:
    m, f = p.m, p.f
    Om = z.Omega
    return DynState(
        rho0=ints.cI / Om ** (2.0 * (m - 1.0)),
        B=z.Bbar / Om ** (2.0 * m),
        B_S=z.Bbar_S / Om ** (2.0 * m),
        B_N=z.Bbar_N / Om ** (2.0 * m),
        G=2.0 * z.OmegaDot / Om,
        G_N=z.Gbar_N / Om**2,
        G_S=z.Gbar_S / Om**2,
        G_R=ints.c0 / Om**2 - f / 2.0,
        Psi_flux=ints.nu * Om ** (2.0 * (m - 1.0)),
        Omega=Om,
    )


def modulated_rhs(z: ModState, p: Params, c0: float) -> np.ndarray:
    out = np.empty(7)
    kernels.rhs_modulated(z.as_array(), p.m, p.f, p.alpha, c0, out)
    return out


class ModTrajectory:
    """Dense solution of the modulated system (layout MOD_FIELDS)."""

    def __init__(self, times, states, dense, c0: float, p: Params):
        self.times = times
        self.states = states
        self.c0 = c0
        self.params = p
        self._dense = dense

    def state(self, t: float) -> np.ndarray:
        return self._dense(t)

    def mod_state(self, t: float) -> ModState:
        return ModState.from_array(self._dense(t))

    def sample(self, n: int):
        ts = np.linspace(self.times[0], self.times[-1], n)
        return ts, np.array([self._dense(t) for t in ts])


def integrate_modulated(z0: ModState, p: Params, c0: float, t_end: float,
                        tol: float, samples: int = 201) -> ModTrajectory:
    m, f, alpha = p.m, p.f, p.alpha
    out = np.empty(7)

    def fun(t, z):
        kernels.rhs_modulated(z, m, f, alpha, c0, out)
        return out.copy()

    def floor_event(t, z):
        return z[5] - 1e-8

    floor_event.terminal = True
    floor_event.direction = -1.0

    sol = solve_ivp(
        fun, (0.0, t_end), z0.as_array(), method="DOP853", rtol=tol,
        atol=tol * 1e-2, dense_output=True,
        t_eval=np.linspace(0.0, t_end, samples), events=floor_event,
    )
    if sol.status == 1:
        raise OmegaCollapse(float(sol.t_events[0][0]))
    if not sol.success:
        raise StepFailure(sol.message)
    return ModTrajectory(sol.t, sol.y.T.copy(), sol.sol, c0, p)


def integrals(z: ModState, p: Params, c0: float) -> tuple[float, float, float, float]:
    """(cII, cIII, cIV, cV) evaluated from a modulated state."""
    alpha, m, f = p.alpha, p.m, p.f
    Bb, BbS, BbN, GbS, GbN, Om = z.Bbar, z.Bbar_S, z.Bbar_N, z.Gbar_S, z.Gbar_N, z.Omega
    cII = BbS**2 + BbN**2 - Bb**2 / 4.0
    cIII = GbS**2 + GbN**2 - alpha * Bb
    cIV = 2.0 * (BbN * GbS - BbS * GbN) - c0 * Bb
    G = 2.0 * z.OmegaDot / Om
    G_R = c0 / Om**2 - f / 2.0
    if m == 3.0:
        cV = float("nan")
    else:
        cV = (
            2.0 * (G_R + c0 * Bb)
            + 2.0 * G * (BbS * GbS + BbN * GbN)
            + 4.0 * alpha * cII * (m - 1.0) / ((m - 3.0) * Om**2)
            - Bb * Om**2 * ((GbS**2 + GbN**2) / Om**4 + G**2 / 4.0 + G_R**2)
        )
    return cII, cIII, cIV, cV


def parametrize(z: ModState, ints: IntegralSet) -> tuple[float, float]:
    """Angles (phi, theta) of the trigonometric closure

        Bbar_S = -r1*cos(phi),  Bbar_N = -r1*sin(phi),
        Gbar_S = -r2*sin(theta), Gbar_N = +r2*cos(theta),

    with r1 = sqrt(cII + Bbar**2/4), r2 = sqrt(cIII + alpha*Bbar).
    Angles are returned in (-pi, pi]; DenomZero if a radius vanishes.
    """
    r1sq = ints.cII + z.Bbar**2 / 4.0
    r2sq = ints.cIII + ints.alpha * z.Bbar
    if r1sq <= 0.0:
        raise DenomZero("ellipse radius r1", z.Omega)
    if r2sq <= 0.0:
        raise DenomZero("deformation radius r2", z.Omega)
    phi = math.atan2(-z.Bbar_N, -z.Bbar_S)
    theta = math.atan2(-z.Gbar_S, z.Gbar_N)
    return phi, theta


def angle_rhs(omega: float, omega_dot: float, ints: IntegralSet, f: float) -> tuple[float, float]:
    """Rates (phiDot, thetaDot) of the closure angles on the constrained
    branch.  Neither rate depends on the angles themselves:

        phiDot   = f + (2/Omega**2) * (delta*num/(delta**2 + 4*cII*Omega**4) - c0)
        thetaDot = f - (alpha/Omega**2) * num/(alpha*delta + cIII*Omega**2)

    with num = c0*delta + cIV*Omega**2.  DenomZero when a denominator
    vanishes.
    """
    Om2 = omega**2
    Om4 = Om2 * Om2
    d1 = ints.delta**2 + 4.0 * ints.cII * Om4
    d2 = ints.alpha * ints.delta + ints.cIII * Om2
    if d1 == 0.0:
        raise DenomZero("phi rate", omega)
    if d2 == 0.0:
        raise DenomZero("theta rate", omega)
    num = ints.c0 * ints.delta + ints.cIV * Om2
    phi_dot = f + (2.0 / Om2) * (ints.delta * num / d1 - ints.c0)
    theta_dot = f - (ints.alpha / Om2) * num / d2
    return phi_dot, theta_dot


def omega_first_integral_residual(omega: float, omega_dot: float,
                                  ints: IntegralSet) -> float:
    """Residual of the quartic first integral of the amplitude equation:

        delta**2*OmegaDot**2 + (c0**2 - cIII)*delta**2/Omega**2
        + (cIV**2 - 4*cII*cIII)*Omega**2 - alpha*delta**3/Omega**4
        + 2*c0*cIV - 4*alpha*cII*delta

    which vanishes identically on constrained-branch trajectories.
    """
    d = ints.delta
    return (
        d**2 * omega_dot**2
        + (ints.c0**2 - ints.cIII) * d**2 / omega**2
        + (ints.cIV**2 - 4.0 * ints.cII * ints.cIII) * omega**2
        - ints.alpha * d**3 / omega**4
        + 2.0 * ints.c0 * ints.cIV
        - 4.0 * ints.alpha * ints.cII * d
    )


def k_form_residual(omega: float, omega_dot: float, ints: IntegralSet) -> float:
    """Residual of the reduced form of the amplitude first integral:

        OmegaDot**2 + (f**2/4)*Omega**2 + (c0**2 - cIII)/Omega**2
            - alpha*delta/Omega**4 + k,

    with k = (2*c0*cIV - 4*alpha*cII*delta)/delta**2.  Dividing the quartic
    residual by delta**2 and applying the consistency relation
    cIV**2 - 4*cII*cIII = delta**2*f**2/4 recovers this form, so the two
    residuals agree up to the factor delta**2 (the f**2/4 coefficient is
    evaluated from the constants here, which makes that identity exact).
    """
    f2_4 = (ints.cIV**2 - 4.0 * ints.cII * ints.cIII) / ints.delta**2
    return (
        omega_dot**2
        + f2_4 * omega**2
        + (ints.c0**2 - ints.cIII) / omega**2
        - ints.alpha * ints.delta / omega**4
        + ints.k
    )
