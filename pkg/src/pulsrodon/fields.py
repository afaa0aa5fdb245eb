"""Physical-space field reconstruction and governing-equation residuals.

A ten-component state plus the ellipse-centre motion determines the full
set of fields at a point:

    F(x, t)  = (x - M).T @ E @ (x - M) + rho0        (M = centre)
    rho      = F**(1/(m-1))
    velocity = L @ (x - M) + MDot
    A        = Psi_flux * F,   (Hx, Hy) = (dA/dy, -dA/dx)
    h        = lambda_t * rho
    p        = eps0*rho**2 + eps1*rho**(m-1) + eps2*rho**m
    T        = eps0*rho + eps1*rho**(m-2) + eps2*rho**(m-1)
    S        = -ln(rho) + ln(T)

The residual checker evaluates the governing equations at grid points with
two independent time-derivative routes (exact tangents from the
right-hand side, and finite differences of the trajectory) so that the
algebraic reduction and the integrator are tested separately.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .dynsys import rhs
from .exact import translation_solve
from .model import (
    DomainError,
    DynState,
    GridOutsideSupport,
    Params,
    STATE_FIELDS,
)

__all__ = [
    "FieldSample",
    "GridSpec",
    "MaxResidual",
    "ResidualReport",
    "reconstruct",
    "pde_residuals",
    "negative_control",
]


@dataclass(frozen=True)
class FieldSample:
    x: float
    y: float
    u: float
    v: float
    rho: float
    pressure: float
    T: float
    S: float
    A: float
    h: float
    Hx: float
    Hy: float


@dataclass(frozen=True)
class GridSpec:
    """Evaluation grid: nx*ny points per time slice, nt slices, inside the
    axis-aligned square inscribed in the density support and shrunk by
    scale."""
    nx: int = 20
    ny: int = 20
    nt: int = 11
    scale: float = 0.8


def _coefficients(s: DynState, p: Params) -> tuple[float, float, float]:
    e0 = -p.mu * p.lambda_t**2 / 2.0
    e1 = -2.0 * p.mu * s.Psi_flux**2 * s.B
    e2 = p.alpha * (p.m - 1.0) / p.m * s.Omega ** (2.0 * (p.m - 2.0))
    return e0, e1, e2


def reconstruct(s: DynState, trans, p: Params, x: float, y: float) -> FieldSample:
    """Fields at the point (x, y); trans = (qbar, pbar, qbar_dot, pbar_dot)
    is the ellipse-centre state at the same instant.

    Raises DomainError outside the density support (F <= 0) or where the
    temperature is nonpositive (entropy undefined)."""
    m = p.m
    qbar, pbar, qbar_dot, pbar_dot = (float(v) for v in trans)
    xt = np.array([x - qbar, y - pbar])
    E = s.ellipse_matrix()
    L = s.gradient_matrix()
    F = float(xt @ E @ xt) + s.rho0
    if F <= 0.0:
        raise DomainError(f"point ({x:g}, {y:g}) outside the density support")
    rho = F ** (1.0 / (m - 1.0))
    vel = L @ xt + np.array([qbar_dot, pbar_dot])
    e0, e1, e2 = _coefficients(s, p)
    pressure = e0 * rho**2 + e1 * rho ** (m - 1.0) + e2 * rho**m
    T = e0 * rho + e1 * rho ** (m - 2.0) + e2 * rho ** (m - 1.0)
    if T <= 0.0:
        raise DomainError(f"nonpositive temperature at ({x:g}, {y:g})")
    S = -math.log(rho) + math.log(T)
    A = s.Psi_flux * F
    Ext = E @ xt
    return FieldSample(
        x=x, y=y, u=float(vel[0]), v=float(vel[1]), rho=rho,
        pressure=pressure, T=T, S=S, A=A, h=p.lambda_t * rho,
        Hx=2.0 * s.Psi_flux * float(Ext[1]),
        Hy=-2.0 * s.Psi_flux * float(Ext[0]),
    )


@dataclass(frozen=True)
class MaxResidual:
    value: float
    t: float
    x: float
    y: float


@dataclass(frozen=True)
class ResidualReport:
    rows: dict

    def value(self, name: str) -> float:
        return self.rows[name].value

    def worst(self, names=None) -> float:
        pool = self.rows if names is None else {n: self.rows[n] for n in names}
        return max(r.value for r in pool.values())

    def format(self) -> str:
        return "\n".join(
            f"{name:<18s} max |res| {r.value:.3e}  at t={r.t:.4g} x={r.x:+.4g} y={r.y:+.4g}"
            for name, r in self.rows.items()
        )


CHAIN_ROWS = ("mass", "mom-full-x", "mom-full-y", "mom-reduced-x",
              "mom-reduced-y", "flux", "entropy", "energy")


def _grid_points(s: DynState, centre, grid: GridSpec) -> np.ndarray:
    negE = -s.ellipse_matrix()
    eigs = np.linalg.eigvalsh(negE)
    if eigs[0] <= 0.0:
        raise GridOutsideSupport(
            "density support is not elliptic (E not negative definite)")
    rmax = math.sqrt(s.rho0 / eigs[-1])
    half = grid.scale * rmax / math.sqrt(2.0)
    xs = np.linspace(-half, half, grid.nx) + centre[0]
    ys = np.linspace(-half, half, grid.ny) + centre[1]
    X, Y = np.meshgrid(xs, ys)
    return np.column_stack([X.ravel(), Y.ravel()])


def _residuals_at(y: np.ndarray, dy: np.ndarray, trans, p: Params,
                  pts: np.ndarray):
    """Largest absolute residual of each governing equation over pts.

    y, dy: state and its time derivative (any consistent source); trans =
    (qbar, pbar, qbar_dot, pbar_dot).  Returns dict name -> (value, x, y).
    """
    m, f, mu, lam = p.m, p.f, p.mu, p.lambda_t
    s = DynState.from_array(y)
    ds = dict(zip(STATE_FIELDS, dy))
    E = s.ellipse_matrix()
    L = s.gradient_matrix()
    dE = np.array([
        [ds["B"] / 2.0 + ds["B_N"], ds["B_S"]],
        [ds["B_S"], ds["B"] / 2.0 - ds["B_N"]],
    ])
    dL = np.array([
        [ds["G"] / 2.0 + ds["G_N"], ds["G_S"] - ds["G_R"]],
        [ds["G_S"] + ds["G_R"], ds["G"] / 2.0 - ds["G_N"]],
    ])
    e0, e1, e2 = _coefficients(s, p)
    # coefficient rates by the chain rule through the supplied tangent
    de2 = 2.0 * (m - 2.0) * e2 / s.Omega * ds["Omega"]
    de1 = -2.0 * mu * (2.0 * s.Psi_flux * ds["Psi_flux"] * s.B
                       + s.Psi_flux**2 * ds["B"])
    qbar, pbar, qbar_dot, pbar_dot = (float(v) for v in trans)
    Mdot = np.array([qbar_dot, pbar_dot])
    Mddot = np.array([f * pbar_dot, -f * qbar_dot])

    out = {name: (0.0, 0.0, 0.0) for name in CHAIN_ROWS}
    for px, py in pts:
        xt = np.array([px - qbar, py - pbar])
        F = float(xt @ E @ xt) + s.rho0
        if F <= 0.0:
            raise GridOutsideSupport(f"grid point ({px:g}, {py:g}) left the support")
        rho = F ** (1.0 / (m - 1.0))
        gradF = 2.0 * E @ xt
        Ft = float(xt @ dE @ xt) - 2.0 * float(xt @ (E @ Mdot)) + ds["rho0"]
        rho_t = rho * Ft / ((m - 1.0) * F)
        grad_rho = rho * gradF / ((m - 1.0) * F)
        qv = L @ xt + Mdot
        q_t = dL @ xt - L @ Mdot + Mddot
        conv = L @ qv
        cor = f * np.array([-qv[1], qv[0]])
        mass = rho_t + float(qv @ grad_rho) + rho * s.G
        mom_red = q_t + conv + cor + (m / (m - 1.0)) * e2 * gradF
        dp = (2.0 * e0 * rho + (m - 1.0) * e1 * rho ** (m - 2.0)
              + m * e2 * rho ** (m - 1.0)) * grad_rho
        lor = (mu * (2.0 * s.Psi_flux * s.B) * s.Psi_flux * gradF
               + mu * lam**2 * rho * grad_rho)
        mom_full = rho * (q_t + conv + cor) + lor + dp
        flux = ds["Psi_flux"] * F + s.Psi_flux * (Ft + float(qv @ gradF))
        T = e0 * rho + e1 * rho ** (m - 2.0) + e2 * rho ** (m - 1.0)
        if T <= 0.0:
            raise DomainError(f"nonpositive temperature at ({px:g}, {py:g})")
        dTdrho = e0 + (m - 2.0) * e1 * rho ** (m - 3.0) + (m - 1.0) * e2 * rho ** (m - 2.0)
        T_t = de1 * rho ** (m - 2.0) + de2 * rho ** (m - 1.0) + dTdrho * rho_t
        grad_T = dTdrho * grad_rho
        S_t = -rho_t / rho + T_t / T
        grad_S = -grad_rho / rho + grad_T / T
        entropy = S_t + float(qv @ grad_S)
        energy = (-s.G * ((m - 3.0) * e1 * rho ** (m - 2.0)
                          + (m - 2.0) * e2 * rho ** (m - 1.0))
                  + de1 * rho ** (m - 2.0) + de2 * rho ** (m - 1.0))
        vals = {
            "mass": mass,
            "mom-full-x": mom_full[0], "mom-full-y": mom_full[1],
            "mom-reduced-x": mom_red[0], "mom-reduced-y": mom_red[1],
            "flux": flux, "entropy": entropy, "energy": energy,
        }
        for name, v in vals.items():
            if abs(v) > out[name][0]:
                out[name] = (abs(v), px, py)
    return out


def pde_residuals(traj, p: Params, grid: GridSpec,
                  translation_init=(0.0, 0.0, 0.0, 0.0),
                  fd_step: float = 1e-5) -> ResidualReport:
    """Residuals of the governing equations over a space-time grid.

    Two rows per equation: the plain name uses exact tangents (the
    right-hand side evaluated at the trajectory point, so the row tests
    the algebraic reduction), the "-fd" row differentiates the dense
    trajectory in time with step fd_step (so it also tests the
    integration).  The magnetic field is divergence-free by construction;
    the div-H row records the exact algebraic value."""
    t_end = traj.t_end
    ts = np.linspace(0.05 * t_end, 0.95 * t_end, grid.nt)
    rows: dict[str, MaxResidual] = {}

    def fold(tag, t, vals):
        for name, (v, px, py) in vals.items():
            key = name + tag
            if key not in rows or v > rows[key].value:
                rows[key] = MaxResidual(value=v, t=t, x=px, y=py)

    div_h = 0.0
    for t in ts:
        y = traj.state(t)
        s = DynState.from_array(y)
        qb, pb, qd, pd = translation_solve(p.f, translation_init, t)
        trans = (float(qb), float(pb), float(qd), float(pd))
        pts = _grid_points(s, (trans[0], trans[1]), grid)
        dy = rhs(s, p)
        fold("", t, _residuals_at(y, dy, trans, p, pts))
        h = fd_step
        dy_fd = (traj.state(t + h) - traj.state(t - h)) / (2.0 * h)
        fold("-fd", t, _residuals_at(y, dy_fd, trans, p, pts))
        E = s.ellipse_matrix()
        div_h = max(div_h, abs(2.0 * s.Psi_flux * (E[1, 0] - E[0, 1])))
    rows["div-H"] = MaxResidual(value=div_h, t=float(ts[0]), x=0.0, y=0.0)
    return ResidualReport(rows=rows)


def negative_control(traj, p: Params, grid: GridSpec,
                     translation_init=(0.0, 0.0, 0.0, 0.0),
                     component: str = "B_S", bump: float = 0.1) -> float:
    """Largest mass/momentum residual after corrupting one state component
    while keeping the true tangent; a sound residual evaluator must flag
    this well above the pass tolerances.

    Evaluated at t = 0 on the grid of the uncorrupted state (the corrupted
    state need not define an elliptic support of its own)."""
    idx = STATE_FIELDS.index(component)
    t = 0.0
    y = traj.state(t).copy()
    s_true = DynState.from_array(y)
    dy = rhs(s_true, p)
    qb, pb, qd, pd = translation_solve(p.f, translation_init, t)
    trans = (float(qb), float(pb), float(qd), float(pd))
    pts = _grid_points(s_true, (trans[0], trans[1]), grid)
    y[idx] += bump
    vals = _residuals_at(y, dy, trans, p, pts)
    return max(vals[n][0] for n in ("mass", "mom-reduced-x", "mom-reduced-y"))
