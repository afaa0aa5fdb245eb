"""Domain types, parameter validation, and the coefficient algebra.

The gas law is the three-term pressure-density ansatz

    p = eps0*rho**2 + eps1*rho**(m-1) + eps2*rho**m

with temperature T = eps0*rho + eps1*rho**(m-2) + eps2*rho**(m-1) and
entropy S = -ln(rho) + ln(T).  Consistency of the reduction ties the
coefficients to the ansatz parameters:

    eps0 = -mu*lambda_t**2 / 2            (transverse-field balance)
    eps1 = -2*mu*Psi_flux**2*B            (in-plane flux balance)
    eps2 = alpha*((m-1)/m)*Omega**(2*(m-2))   (amplitude power law)

Everything in this module is an immutable value; operations are pure.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping

import numpy as np

__all__ = [
    "Params",
    "DynState",
    "IntegralSet",
    "STATE_FIELDS",
    "validate_params",
    "epsilon2",
    "epsilon1",
    "derive_constants",
    "PulsrodonError",
    "ConfigError",
    "DomainError",
    "SqrtDomain",
    "DenomZero",
    "RejectM",
    "RejectGamma",
    "RejectMu",
    "Inconsistent",
    "OmegaCollapse",
    "StepFailure",
    "TurningPointStall",
    "GridOutsideSupport",
]


class PulsrodonError(Exception):
    """Base class for all package errors."""


class ConfigError(PulsrodonError):
    """Invalid configuration or parameter set."""


class DomainError(PulsrodonError):
    """Evaluation requested outside the mathematical domain."""


class SqrtDomain(DomainError):
    def __init__(self, which: str, value: float):
        super().__init__(f"negative radicand in {which}: {value:.6g}")
        self.which = which
        self.value = value


class DenomZero(DomainError):
    def __init__(self, which: str, omega: float):
        super().__init__(f"vanishing denominator in {which} at Omega={omega:.6g}")
        self.which = which
        self.omega = omega


class RejectM(ConfigError):
    pass


class RejectGamma(ConfigError):
    pass


class RejectMu(ConfigError):
    pass


class Inconsistent(PulsrodonError):
    def __init__(self, relation: str, residual: float):
        super().__init__(f"constants violate {relation}: residual {residual:.3e}")
        self.relation = relation
        self.residual = residual


class OmegaCollapse(PulsrodonError):
    def __init__(self, t: float):
        super().__init__(f"amplitude Omega reached zero near t={t:.6g}")
        self.t = t


class StepFailure(PulsrodonError):
    pass


class TurningPointStall(PulsrodonError):
    pass


class GridOutsideSupport(DomainError):
    pass


BRANCHES = ("constrained", "transverse")

# Canonical state component order used by the kernels and by CSV output.
STATE_FIELDS = (
    "rho0", "B", "B_S", "B_N", "G", "G_N", "G_S", "G_R", "Psi_flux", "Omega",
)


@dataclass(frozen=True)
class Params:
    """Physical and ansatz constants.

    Attributes
    ----------
    m : pressure-density exponent (the companion exponent is always m - 1).
    f : Coriolis constant.
    mu : magnetic permeability, must be positive.
    lambda_t : transverse-field proportionality, h = lambda_t * rho.
    alpha : amplitude constant of the eps2 power law.
    nu : flux amplitude, Psi_flux = nu * Omega**(2*(m-1)).
    gamma : adiabatic index, fixed at 2 by the reduction.
    branch : "constrained" (Omega**2 * Bbar held constant) or "transverse"
        (nu = 0, zero in-plane flux, no delta constraint).
    alpha0, alpha1, alpha2 : integration constants of the coefficient rate
        laws; alpha0 is forced to -mu*lambda_t**2/2, the others are filled
        when determinable and checked when supplied.
    """

    m: float
    f: float
    mu: float = 1.0
    lambda_t: float = 0.0
    alpha: float = 1.0
    nu: float = 1.0
    gamma: float = 2.0
    branch: str = "constrained"
    alpha0: float | None = None
    alpha1: float | None = None
    alpha2: float | None = None


def validate_params(p: Params) -> Params:
    """Validate a parameter set and fill the derived coefficient constants.

    Returns a validated copy, or raises a ConfigError subclass naming every
    violated constraint.
    """
    problems = []
    if p.branch not in BRANCHES:
        problems.append(f"branch must be one of {BRANCHES}, got {p.branch!r}")
    excluded = {1.0, 2.0, 3.0} if p.branch == "constrained" else {1.0, 3.0}
    if p.m in excluded:
        raise RejectM(
            f"m={p.m:g} is excluded on the {p.branch} branch: the coefficient "
            f"formulas carry 1/(m-1), 1/(m-2) and 1/(m-3) factors that become "
            f"singular"
        )
    if p.gamma != 2.0:
        raise RejectGamma(
            f"gamma={p.gamma:g}: the reduction forces gamma = 2 exactly"
        )
    if not p.mu > 0.0:
        raise RejectMu(f"mu must be positive, got {p.mu:g}")
    if problems:
        raise ConfigError("; ".join(problems))

    alpha0 = -p.mu * p.lambda_t**2 / 2.0
    if p.alpha0 is not None and abs(p.alpha0 - alpha0) > 1e-12 * max(1.0, abs(alpha0)):
        raise ConfigError(
            f"alpha0={p.alpha0:g} inconsistent with -mu*lambda_t**2/2 = {alpha0:g}"
        )

    alpha2 = p.alpha2
    if p.nu > 0.0:
        expect = p.alpha * (p.m - 1.0) / p.m * p.nu ** ((2.0 - p.m) / (p.m - 1.0))
        if alpha2 is None:
            alpha2 = expect
        elif abs(alpha2 - expect) > 1e-10 * max(1.0, abs(expect)):
            raise ConfigError(
                f"alpha2={alpha2:g} inconsistent with the eps2 amplitude law "
                f"(expected {expect:g})"
            )
    return replace(p, alpha0=alpha0, alpha2=alpha2)


@dataclass(frozen=True)
class DynState:
    """The ten-component dynamical state.

    (rho0, B, B_S, B_N) describe the density ellipse: rho**(m-1) is the
    quadratic form with matrix E = [[B/2 + B_N, B_S], [B_S, B/2 - B_N]]
    offset by rho0.  (G, G_N, G_S, G_R) are the divergence, normal
    deformation, shear and spin entries of the velocity-gradient matrix
    L = [[G/2 + G_N, G_S - G_R], [G_S + G_R, G/2 - G_N]].  Psi_flux is the
    time factor of the magnetic flux and Omega the amplitude variable with
    G = 2*OmegaDot/Omega.
    """

    rho0: float
    B: float
    B_S: float
    B_N: float
    G: float
    G_N: float
    G_S: float
    G_R: float
    Psi_flux: float
    Omega: float

    def __post_init__(self):
        if not self.rho0 > 0.0:
            raise DomainError(f"rho0 must be positive, got {self.rho0:g}")
        if not self.Omega > 0.0:
            raise DomainError(f"Omega must be positive, got {self.Omega:g}")

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in STATE_FIELDS])

    @classmethod
    def from_array(cls, y) -> "DynState":
        return cls(*(float(v) for v in y))

    def ellipse_matrix(self) -> np.ndarray:
        """E such that the density quadratic is x.T @ E @ x + rho0."""
        return np.array([
            [self.B / 2.0 + self.B_N, self.B_S],
            [self.B_S, self.B / 2.0 - self.B_N],
        ])

    def gradient_matrix(self) -> np.ndarray:
        """L such that the velocity is L @ x + translation."""
        return np.array([
            [self.G / 2.0 + self.G_N, self.G_S - self.G_R],
            [self.G_S + self.G_R, self.G / 2.0 - self.G_N],
        ])


@dataclass(frozen=True)
class IntegralSet:
    """Derived constants of the motion with their consistency residuals.

    consistency maps relation names to residuals; ok() is True when every
    recorded residual is below its tolerance (stored alongside).
    """

    c0: float
    cI: float
    cII: float
    cIII: float
    cIV: float
    cV: float
    delta: float
    k: float
    nu: float
    alpha: float
    consistency: Mapping[str, float] = field(default_factory=dict)

    def ok(self, tol: float = 1e-8) -> bool:
        return all(abs(r) <= tol for r in self.consistency.values())


def epsilon2(omega: float, p: Params) -> float:
    """Pressure coefficient of the rho**m term: alpha*((m-1)/m)*omega**(2(m-2))."""
    if not omega > 0.0:
        raise DomainError(f"Omega must be positive, got {omega:g}")
    return p.alpha * (p.m - 1.0) / p.m * omega ** (2.0 * (p.m - 2.0))


def epsilon1(state: DynState, p: Params) -> float:
    """Pressure coefficient of the rho**(m-1) term: -2*mu*Psi_flux**2*B."""
    return -2.0 * p.mu * state.Psi_flux**2 * state.B


def alpha1_constant(p: Params, delta: float) -> float | None:
    """Integration constant of the eps1 rate law on the constrained branch.

    eps1 = alpha1 * Psi_flux**((m-3)/(m-1)) with
    alpha1 = -2*mu*delta*nu**((m+1)/(m-1)); None when nu <= 0 (fractional
    power of a nonpositive base).
    """
    if p.nu <= 0.0:
        return None
    return -2.0 * p.mu * delta * p.nu ** ((p.m + 1.0) / (p.m - 1.0))


def derive_constants(
    s0: DynState,
    p: Params,
    *,
    check: bool = True,
    tol: float = 1e-8,
) -> IntegralSet:
    """Compute the constants of the motion from a state.

    The formulas are exact at any trajectory point; the conventional
    normalization Omega(0) = 1 makes the values reproducible across runs.
    On the constrained branch the quartic consistency relation
    cIV**2 - 4*cII*cIII = delta**2*f**2/4 is checked and Inconsistent is
    raised when its residual exceeds tol (relative to the term scale).
    """
    m, f, alpha = p.m, p.f, p.alpha
    Om = s0.Omega
    Bb = Om ** (2.0 * m) * s0.B
    BbS = Om ** (2.0 * m) * s0.B_S
    BbN = Om ** (2.0 * m) * s0.B_N
    GbS = Om**2 * s0.G_S
    GbN = Om**2 * s0.G_N

    c0 = Om**2 * (s0.G_R + f / 2.0)
    cI = s0.rho0 * Om ** (2.0 * (m - 1.0))
    nu = s0.Psi_flux * Om ** (-2.0 * (m - 1.0))
    cII = BbS**2 + BbN**2 - Bb**2 / 4.0
    cIII = GbS**2 + GbN**2 - alpha * Bb
    cIV = 2.0 * (BbN * GbS - BbS * GbN) - c0 * Bb
    delta = Om**2 * Bb
    if m == 3.0:
        cV = float("nan")
    else:
        cV = _cv_printed(s0, p, c0, Bb, BbS, BbN, GbS, GbN)
    k = float("nan") if delta == 0.0 else (2.0 * c0 * cIV - 4.0 * alpha * cII * delta) / delta**2

    consistency = {}
    if p.branch == "constrained":
        scale = max(abs(cIV**2), abs(4.0 * cII * cIII), abs(delta**2 * f**2 / 4.0), 1e-30)
        res = (cIV**2 - 4.0 * cII * cIII - delta**2 * f**2 / 4.0) / scale
        consistency["quartic-relation"] = res
        if check and abs(res) > tol:
            raise Inconsistent("cIV**2 - 4*cII*cIII = delta**2*f**2/4", res)
    return IntegralSet(
        c0=c0, cI=cI, cII=cII, cIII=cIII, cIV=cIV, cV=cV,
        delta=delta, k=k, nu=nu, alpha=alpha, consistency=consistency,
    )


def _cv_printed(s, p, c0, Bb, BbS, BbN, GbS, GbN) -> float:
    # Fifth combination, evaluated exactly as displayed; its conservation is
    # measured, not assumed (the monitor reports it ungated).
    m, alpha = p.m, p.alpha
    Om = s.Omega
    cII = BbS**2 + BbN**2 - Bb**2 / 4.0
    return (
        2.0 * (s.G_R + c0 * Bb)
        + 2.0 * s.G * (BbS * GbS + BbN * GbN)
        + 4.0 * alpha * cII * (m - 1.0) / ((m - 3.0) * Om**2)
        - Bb * Om**2 * ((GbS**2 + GbN**2) / Om**4 + s.G**2 / 4.0 + s.G_R**2)
    )
