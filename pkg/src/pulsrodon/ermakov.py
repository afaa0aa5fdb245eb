"""Two-component oscillator structure of the density-ellipse semi-axes.

With cII < 0 and cI*delta/cII > 0 the ellipse semi-axes

    axisA = sqrt(-cI/(2*cII)) * sqrt(-delta - R)
    axisB = sqrt(-cI/(2*cII)) * sqrt(-delta + R),   R = sqrt(delta**2 + 4*cII*Omega**4)

satisfy a coupled pair of nonlinear oscillator equations of
Ermakov-Ray-Reid type driven by the angular-momentum-like quantity
Z = axisB*dAxisA - dAxisB*axisA.  The sum of squares axisA**2 + axisB**2
equals cI*delta/cII and is constant, which forces the coupling constant in
the pair: k = -f**2*(cI*delta/cII)**2.  The associated Hamiltonian-like
combination is constant along trajectories and equals
-f**2*cI*cIV/(4*cII) exactly when delta = -cIV.

The zero-spin zero-shear (irrotational) reduction of the same system gives
a second Ermakov-Ray-Reid pair in the axis variables directly, with a
polynomial invariant that is checked to integrator accuracy.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np
from scipy.integrate import solve_ivp

from .model import DomainError, IntegralSet, Params, SqrtDomain, StepFailure

__all__ = [
    "SemiAxes",
    "semi_axes",
    "z_from_axes",
    "z_from_omega",
    "err_coupling",
    "hamiltonian_value",
    "hamiltonian_target",
    "ErmakovReport",
    "ermakov_residual",
    "irrotational_rhs",
    "integrate_irrotational",
    "ray_reid_invariant",
    "irrotational_hamiltonian",
    "companion_invariant",
    "cstar_constants",
]


@dataclass(frozen=True)
class SemiAxes:
    axisA: float
    axisB: float
    dAxisA: float
    dAxisB: float

    @property
    def sum_of_squares(self) -> float:
        return self.axisA**2 + self.axisB**2


def semi_axes(omega: float, omega_dot: float, ints: IntegralSet) -> SemiAxes:
    """Ellipse semi-axes and their rates at amplitude omega.

    Requires cII < 0 (elliptic cross-section) and both radicands
    nonnegative; raises SqrtDomain otherwise.
    """
    cI, cII, d = ints.cI, ints.cII, ints.delta
    if cII >= 0.0:
        raise DomainError(f"semi-axes require cII < 0, got cII={cII:g}")
    pref_sq = -cI / (2.0 * cII)
    if pref_sq < 0.0:
        raise SqrtDomain("axis prefactor -cI/(2*cII)", pref_sq)
    Rsq = d**2 + 4.0 * cII * omega**4
    if Rsq < 0.0:
        raise SqrtDomain("axis discriminant R**2", Rsq)
    R = math.sqrt(Rsq)
    radA = -d - R
    radB = -d + R
    if radA < 0.0:
        raise SqrtDomain("major-axis radicand -delta-R", radA)
    if radB < 0.0:
        raise SqrtDomain("minor-axis radicand -delta+R", radB)
    pref = math.sqrt(pref_sq)
    axisA = pref * math.sqrt(radA)
    axisB = pref * math.sqrt(radB)
    if R == 0.0 or axisA == 0.0 or axisB == 0.0:
        raise DomainError("degenerate axes: R or an axis vanished")
    # d(axis**2)/dt = +-4*cI*Omega**3*OmegaDot/R
    dA = 2.0 * cI * omega**3 * omega_dot / (R * axisA)
    dB = -2.0 * cI * omega**3 * omega_dot / (R * axisB)
    return SemiAxes(axisA=axisA, axisB=axisB, dAxisA=dA, dAxisB=dB)


def z_from_axes(sa: SemiAxes) -> float:
    """Z = axisB*dAxisA - dAxisB*axisA (cross rate of the axis pair)."""
    return sa.axisB * sa.dAxisA - sa.dAxisB * sa.axisA


def z_from_omega(omega: float, omega_dot: float, ints: IntegralSet) -> float:
    """Closed form of the same Z through the amplitude:

        Z = -2*cI*delta*Omega*OmegaDot / (sqrt(-cII)*R)
    """
    cI, cII, d = ints.cI, ints.cII, ints.delta
    R = math.sqrt(d**2 + 4.0 * cII * omega**4)
    return -2.0 * cI * d * omega * omega_dot / (math.sqrt(-cII) * R)


def err_coupling(ints: IntegralSet, f: float) -> float:
    """Coupling constant forced by the constancy of axisA**2 + axisB**2:

        k = -f**2 * (cI*delta/cII)**2

    This differs from the constant in the amplitude first integral; the
    oscillator pair holds with this k and with no other.
    """
    s2 = ints.cI * ints.delta / ints.cII
    return -(f**2) * s2**2


def hamiltonian_value(sa: SemiAxes, Z: float, k: float, f: float) -> float:
    """Hamiltonian-like combination of the oscillator pair:

        H = (dAxisA**2 + dAxisB**2)/2
            - (Z**2 - (f**2/4)*s2**2 + k/4) / (2*s2),   s2 = axisA**2 + axisB**2.
    """
    s2 = sa.sum_of_squares
    return (
        0.5 * (sa.dAxisA**2 + sa.dAxisB**2)
        - (Z**2 - (f**2 / 4.0) * s2**2 + k / 4.0) / (2.0 * s2)
    )


def hamiltonian_target(ints: IntegralSet, f: float) -> float:
    """Displayed constant -f**2*cI*cIV/(4*cII); the computed H equals this
    exactly when delta = -cIV (then H = (f**2/4)*cI*delta/cII as well)."""
    return -(f**2) * ints.cI * ints.cIV / (4.0 * ints.cII)


@dataclass(frozen=True)
class ErmakovReport:
    times: np.ndarray
    res1: np.ndarray
    res2: np.ndarray
    H: np.ndarray
    k: float
    h: float

    @property
    def max_res(self) -> float:
        return float(max(np.max(np.abs(self.res1)), np.max(np.abs(self.res2))))

    @property
    def H_spread(self) -> float:
        return float(np.max(self.H) - np.min(self.H))


def _omega_pair(traj, t: float) -> tuple[float, float]:
    if hasattr(traj, "scalar"):
        w = traj.scalar(t)
        return float(w[0]), float(w[1])
    y = traj.state(t)
    return float(y[9]), float(y[4] * y[9] / 2.0)


def ermakov_residual(traj, ints: IntegralSet, p: Params, *, k: float | None = None,
                     n: int = 97, h: float | None = None) -> ErmakovReport:
    """Residuals of the oscillator pair along a trajectory.

    Second derivatives of the axes and the first derivative of Z are taken
    with five-point central stencils of width h (default t_end/2000), which
    leaves the FD truncation error well below the gating tolerance for
    smooth trajectories.  k defaults to the forced coupling constant.
    """
    f = p.f
    t_end = traj.t_end
    if h is None:
        h = t_end / 2000.0
    if k is None:
        k = err_coupling(ints, f)
    ts = np.linspace(0.02 * t_end, 0.98 * t_end, n)
    res1 = np.empty(n)
    res2 = np.empty(n)
    Hs = np.empty(n)
    offs = (-2, -1, 0, 1, 2)
    for i, t0 in enumerate(ts):
        pairs = [_omega_pair(traj, t0 + j * h) for j in offs]
        axes = [semi_axes(om, omd, ints) for om, omd in pairs]
        A = np.array([s.axisA for s in axes])
        Bx = np.array([s.axisB for s in axes])
        Zs = np.array([z_from_omega(om, omd, ints) for om, omd in pairs])
        sa = axes[2]
        Add = (-A[4] + 16.0 * A[3] - 30.0 * A[2] + 16.0 * A[1] - A[0]) / (12.0 * h**2)
        Bdd = (-Bx[4] + 16.0 * Bx[3] - 30.0 * Bx[2] + 16.0 * Bx[1] - Bx[0]) / (12.0 * h**2)
        Zd = (-Zs[4] + 8.0 * Zs[3] - 8.0 * Zs[1] + Zs[0]) / (12.0 * h)
        Z = Zs[2]
        ZZp = Zd * sa.axisB**2
        r = sa.axisB / sa.axisA
        rr = sa.axisA / sa.axisB
        res1[i] = (
            Add + f**2 * sa.axisA / 4.0
            - (1.0 / (sa.axisA**2 * sa.axisB))
            * (ZZp / (1.0 + r**2) - r * (Z**2 + k / 4.0) / (1.0 + r**2) ** 2)
        )
        res2[i] = (
            Bdd + f**2 * sa.axisB / 4.0
            - (1.0 / (sa.axisA * sa.axisB**2))
            * (-ZZp / (1.0 + r**2) - rr * (Z**2 + k / 4.0) / (1.0 + rr**2) ** 2)
        )
        Hs[i] = hamiltonian_value(sa, Z, k, f)
    return ErmakovReport(times=ts, res1=res1, res2=res2, H=Hs, k=k, h=h)


# -- zero-spin, zero-shear reduction ----------------------------------------

def irrotational_rhs(y, cstarI: float, cstarII: float) -> np.ndarray:
    """Axis accelerations of the irrotational pair:

        aDotDot = cstarI / (a**2 * b),   bDotDot = cstarII / (a * b**2)

    for y = (a, b, aDot, bDot)."""
    a, b = float(y[0]), float(y[1])
    return np.array([y[2], y[3], cstarI / (a**2 * b), cstarII / (a * b**2)])


class IrrTrajectory:
    def __init__(self, times, states, dense):
        self.times = times
        self.states = states
        self._dense = dense

    def state(self, t: float) -> np.ndarray:
        return self._dense(t)

    def sample(self, n: int):
        ts = np.linspace(self.times[0], self.times[-1], n)
        return ts, np.array([self._dense(t) for t in ts])


def integrate_irrotational(y0, cstarI: float, cstarII: float, t_end: float,
                           tol: float, samples: int = 201) -> IrrTrajectory:
    def fun(t, y):
        return irrotational_rhs(y, cstarI, cstarII)

    sol = solve_ivp(fun, (0.0, t_end), np.asarray(y0, dtype=float),
                    method="DOP853", rtol=tol, atol=tol * 1e-2,
                    dense_output=True, t_eval=np.linspace(0.0, t_end, samples))
    if not sol.success:
        raise StepFailure(sol.message)
    return IrrTrajectory(sol.t, sol.y.T.copy(), sol.sol)


def ray_reid_invariant(y, cstarI: float, cstarII: float) -> float:
    """Polynomial invariant of the irrotational pair:

        I = (a*bDot - b*aDot)**2 / 2 + cstarI*b/a + cstarII*a/b
    """
    a, b, ad, bd = (float(v) for v in y)
    return 0.5 * (a * bd - b * ad) ** 2 + cstarI * b / a + cstarII * a / b


def irrotational_hamiltonian(y, cI_pow: float, cII_pow: float,
                             cstarI: float, cstarII: float) -> float:
    """Energy-like combination exactly as displayed in the source
    derivation, with the axis power-law constants as kinetic weights:

        H = (cI_pow*bDot**2 + cII_pow*aDot**2)/2 + cstarI*cstarII/(a*b)

    Its drift along trajectories is measured, not assumed (the weights do
    not match the accelerations; see companion_invariant)."""
    a, b, ad, bd = (float(v) for v in y)
    return 0.5 * (cI_pow * bd**2 + cII_pow * ad**2) + cstarI * cstarII / (a * b)


def companion_invariant(y, cstarI: float, cstarII: float) -> float:
    """Conserved companion of the displayed energy-like combination:

        H = (cstarII*aDot**2 + cstarI*bDot**2)/2 + cstarI*cstarII/(a*b)

    d/dt of this expression vanishes identically under the irrotational
    accelerations."""
    a, b, ad, bd = (float(v) for v in y)
    return 0.5 * (cstarII * ad**2 + cstarI * bd**2) + cstarI * cstarII / (a * b)


def cstar_constants(cI_pow: float, cII_pow: float, cIII: float,
                    cIIIstar: float, alpha: float, m: float) -> tuple[float, float]:
    """Acceleration constants of the irrotational pair from the axis
    power-law constants and the density normalizations:

        cstarI  = -2*alpha*cI_pow  * (cIIIstar/cIII)**((m-2)/(m-1))
        cstarII = -2*alpha*cII_pow * (cIIIstar/cIII)**((m-2)/(m-1))

    Requires cIII != 0 and a positive ratio (fractional power); m = 1 is
    excluded by the exponent."""
    if cIII == 0.0:
        raise DomainError("cIII must be nonzero")
    ratio = cIIIstar / cIII
    if ratio <= 0.0:
        raise DomainError(f"cIIIstar/cIII must be positive, got {ratio:g}")
    if m == 1.0:
        raise DomainError("m=1 is excluded by the exponent (m-2)/(m-1)")
    fac = ratio ** ((m - 2.0) / (m - 1.0))
    return -2.0 * alpha * cI_pow * fac, -2.0 * alpha * cII_pow * fac
