"""Command-line interface.

Subcommands (all driven by a YAML scenario config):

    simulate    integrate the ten-component system, report invariant drift
    exact       closed-branch construction, consistency and equivalence
    residuals   governing-equation residuals on a space-time grid
    lax         operator-pair compatibility, isospectrality, amplitude law
    ermakov     semi-axis oscillator pair and the zero-spin reduction
    all         every suite enabled by the config

Each subcommand writes report_<name>.txt (one line per check:
"check <id> status <pass|fail|info> value <v> tol <tol>") plus CSV data
files into --outdir, printing the same lines to stdout unless --quiet.
Numbers are written with 17 significant digits and no timestamps, so
repeated runs of the same config are byte-identical.  Exit code 0 when
every gated check passes, 1 when any fails, 2 for configuration errors.
The environment variable PULSRODON_SEED (default 0) seeds the random
spot-check times used by the identity checks.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import yaml

from . import ermakov as erm
from . import lax as laxmod
from .dynsys import integrate, monitor_invariants, rhs
from .exact import build_state, solve_omega
from .fields import GridSpec, negative_control as field_negative_control, pde_residuals
from .model import (
    ConfigError,
    DynState,
    Inconsistent,
    IntegralSet,
    Params,
    PulsrodonError,
    STATE_FIELDS,
    validate_params,
)
from .reduced import integrate_modulated, to_modulated

__all__ = ["ScenarioConfig", "load_config", "main"]

SUBCOMMANDS = ("simulate", "exact", "residuals", "lax", "ermakov")

SIM_TOLS = {
    "cI": 1e-7, "c0": 1e-7, "nu": 1e-7, "cII": 1e-7, "cIII": 1e-7,
    "cIV": 1e-7, "delta": 1e-7,
    "M-product": 1e-6, "Q-product": 1e-6, "Delta-product": 1e-6,
}


@dataclass(frozen=True)
class ReportRow:
    check_id: str
    status: str
    value: float
    tol: float | None

    def line(self) -> str:
        tol = "-" if self.tol is None else format(self.tol, ".17g")
        return (f"check {self.check_id} status {self.status} "
                f"value {format(self.value, '.17g')} tol {tol}")


def _lt(check_id: str, value: float, tol: float) -> ReportRow:
    return ReportRow(check_id, "pass" if value < tol else "fail", value, tol)


def _le(check_id: str, value: float, tol: float) -> ReportRow:
    return ReportRow(check_id, "pass" if value <= tol else "fail", value, tol)


def _gt(check_id: str, value: float, tol: float) -> ReportRow:
    return ReportRow(check_id, "pass" if value > tol else "fail", value, tol)


def _info(check_id: str, value: float) -> ReportRow:
    return ReportRow(check_id, "info", value, None)


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    params: Params
    initial_kind: str
    integrals: dict | None
    phi0: float
    omega_dot_sign: int
    omega_dot0: float | None
    state0: DynState | None
    translation: tuple
    t_end: float
    tol: float
    samples: int
    grid: GridSpec
    lambdas: tuple
    checks: dict
    irrotational: dict | None


_INTEGRAL_KEYS = ("c0", "cI", "cII", "cIII", "cIV", "delta")
_PARAM_KEYS = ("m", "f", "mu", "lambda_t", "alpha", "nu", "gamma", "branch")
_IRR_KEYS = ("cI_pow", "cII_pow", "cIII", "cIIIstar", "initial", "t_end", "tol")


def load_config(path: str) -> ScenarioConfig:
    """Parse and validate a scenario config; raises ConfigError listing
    every problem found."""
    try:
        with open(path) as fh:
            raw = yaml.safe_load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except yaml.YAMLError as e:
        raise ConfigError(f"config is not valid YAML: {e}")
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping at the top level")

    problems: list[str] = []

    sv = raw.get("schema_version")
    if sv != 1:
        problems.append(f"schema_version must be 1, got {sv!r}")

    name = raw.get("name", os.path.splitext(os.path.basename(path))[0])

    pblock = raw.get("params")
    params = None
    if not isinstance(pblock, dict):
        problems.append("params block is required")
    else:
        unknown = set(pblock) - set(_PARAM_KEYS)
        if unknown:
            problems.append(f"unknown params keys: {sorted(unknown)}")
        missing = [k for k in ("m", "f") if k not in pblock]
        if missing:
            problems.append(f"params block missing required keys: {missing}")
        if not problems or (not unknown and not missing):
            try:
                params = validate_params(Params(**{
                    k: pblock[k] for k in _PARAM_KEYS if k in pblock}))
            except (ConfigError, TypeError) as e:
                problems.append(f"params: {e}")

    iblock = raw.get("initial")
    kind = None
    integrals = None
    phi0 = 0.0
    omega_dot_sign = 1
    omega_dot0 = None
    state0 = None
    if not isinstance(iblock, dict):
        problems.append("initial block is required")
    else:
        kind = iblock.get("kind")
        if kind not in ("exact", "raw"):
            problems.append(f"initial.kind must be 'exact' or 'raw', got {kind!r}")
        elif kind == "exact":
            ints_map = iblock.get("integrals")
            if not isinstance(ints_map, dict):
                problems.append("initial.integrals block is required for kind 'exact'")
            else:
                missing = [k for k in _INTEGRAL_KEYS if k not in ints_map]
                if missing:
                    problems.append(f"initial.integrals missing keys: {missing}")
                else:
                    integrals = {k: float(ints_map[k]) for k in _INTEGRAL_KEYS}
            phi0 = float(iblock.get("phi0", 0.0))
            omega_dot_sign = int(iblock.get("omega_dot_sign", 1))
            if omega_dot_sign not in (1, -1):
                problems.append("initial.omega_dot_sign must be 1 or -1")
            if "omega_dot0" in iblock:
                omega_dot0 = float(iblock["omega_dot0"])
            if params is not None and params.branch != "constrained":
                problems.append("initial.kind 'exact' requires branch 'constrained'")
        else:
            smap = iblock.get("state")
            if not isinstance(smap, dict):
                problems.append("initial.state block is required for kind 'raw'")
            else:
                missing = [k for k in STATE_FIELDS if k not in smap]
                if missing:
                    problems.append(f"initial.state missing components: {missing}")
                else:
                    try:
                        state0 = DynState(**{k: float(smap[k]) for k in STATE_FIELDS})
                    except PulsrodonError as e:
                        problems.append(f"initial.state: {e}")

    tblock = raw.get("translation", {})
    translation = (0.0, 0.0, 0.0, 0.0)
    if not isinstance(tblock, dict):
        problems.append("translation must be a mapping")
    else:
        translation = tuple(float(tblock.get(k, 0.0))
                            for k in ("qbar", "pbar", "qbar_dot", "pbar_dot"))

    rblock = raw.get("run")
    t_end, tol, samples = 10.0, 1e-10, 201
    if not isinstance(rblock, dict):
        problems.append("run block is required")
    else:
        t_end = float(rblock.get("t_end", 10.0))
        tol = float(rblock.get("tol", 1e-10))
        samples = int(rblock.get("samples", 201))
        if t_end <= 0.0:
            problems.append("run.t_end must be positive")
        if tol <= 0.0:
            problems.append("run.tol must be positive")
        if samples < 2:
            problems.append("run.samples must be at least 2")

    gblock = raw.get("grid", {})
    grid = GridSpec()
    if isinstance(gblock, dict):
        grid = GridSpec(
            nx=int(gblock.get("nx", 20)), ny=int(gblock.get("ny", 20)),
            nt=int(gblock.get("nt", 11)), scale=float(gblock.get("scale", 0.8)),
        )
        if grid.nx < 2 or grid.ny < 2 or grid.nt < 2:
            problems.append("grid.nx, grid.ny, grid.nt must each be at least 2")
        if not 0.0 < grid.scale < 1.0:
            problems.append("grid.scale must be in (0, 1)")
    else:
        problems.append("grid must be a mapping")

    lambdas = tuple(float(v) for v in raw.get("lambdas", (-2.0, -1.0, 0.0, 1.0, 2.0)))

    exactish = kind == "exact"
    checks = {"simulate": True, "exact": exactish, "residuals": True,
              "lax": exactish, "ermakov": exactish}
    cblock = raw.get("checks", {})
    if isinstance(cblock, dict):
        unknown = set(cblock) - set(checks)
        if unknown:
            problems.append(f"unknown checks keys: {sorted(unknown)}")
        checks.update({k: bool(v) for k, v in cblock.items() if k in checks})
    else:
        problems.append("checks must be a mapping")
    for suite in ("exact", "lax", "ermakov"):
        if checks.get(suite) and kind == "raw":
            problems.append(f"checks.{suite} requires initial.kind 'exact'")
    if checks.get("lax") and params is not None and params.alpha != 1.0:
        problems.append("checks.lax requires params.alpha = 1")

    irr = raw.get("irrotational")
    if irr is not None:
        if not isinstance(irr, dict):
            problems.append("irrotational must be a mapping")
        else:
            missing = [k for k in _IRR_KEYS if k not in irr]
            if missing:
                problems.append(f"irrotational block missing keys: {missing}")
            elif not isinstance(irr.get("initial"), dict) or \
                    [k for k in ("a", "b", "aDot", "bDot") if k not in irr["initial"]]:
                problems.append("irrotational.initial must supply a, b, aDot, bDot")

    if problems:
        raise ConfigError("; ".join(problems))
    return ScenarioConfig(
        name=str(name), params=params, initial_kind=kind, integrals=integrals,
        phi0=phi0, omega_dot_sign=omega_dot_sign, omega_dot0=omega_dot0,
        state0=state0, translation=translation, t_end=t_end, tol=tol,
        samples=samples, grid=grid, lambdas=lambdas, checks=checks,
        irrotational=irr,
    )


class Runtime:
    """Lazily built shared objects for one scenario run."""

    def __init__(self, cfg: ScenarioConfig):
        self.cfg = cfg
        self.p = cfg.params
        self.seed = int(os.environ.get("PULSRODON_SEED", "0"))

    @cached_property
    def prelim_ints(self) -> IntegralSet:
        c = self.cfg.integrals
        d = c["delta"]
        k = float("nan") if d == 0.0 else \
            (2.0 * c["c0"] * c["cIV"] - 4.0 * self.p.alpha * c["cII"] * d) / d**2
        ints = IntegralSet(
            c0=c["c0"], cI=c["cI"], cII=c["cII"], cIII=c["cIII"],
            cIV=c["cIV"], cV=float("nan"), delta=d, k=k, nu=self.p.nu,
            alpha=self.p.alpha,
        )
        if d != 0.0:
            lhs = c["cIV"] ** 2 - 4.0 * c["cII"] * c["cIII"]
            rhs_v = d**2 * self.p.f**2 / 4.0
            scale = max(abs(lhs), abs(rhs_v), 1e-30)
            if abs(lhs - rhs_v) / scale > 1e-9:
                raise Inconsistent(
                    "cIV**2 - 4*cII*cIII = delta**2*f**2/4",
                    (lhs - rhs_v) / scale)
        return ints

    @cached_property
    def exact_sol(self):
        cfg = self.cfg
        return solve_omega(
            self.prelim_ints, self.p, cfg.t_end, cfg.tol, phi0=cfg.phi0,
            omega_dot_sign=cfg.omega_dot_sign, omega_dot0=cfg.omega_dot0,
            translation_init=cfg.translation, samples=cfg.samples,
        )

    @cached_property
    def state0(self) -> DynState:
        if self.cfg.initial_kind == "exact":
            return build_state(self.exact_sol, 0.0)
        return self.cfg.state0

    @cached_property
    def ints(self) -> IntegralSet:
        from .model import derive_constants

        return derive_constants(self.state0, self.p)

    @cached_property
    def full_traj(self):
        cfg = self.cfg
        return integrate(self.state0, self.p, cfg.t_end, cfg.tol, cfg.samples)


def _write_csv(path: str, header, rows) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(format(float(v), ".17g") for v in row) + "\n")


def run_simulate(rt: Runtime, outdir: str) -> list[ReportRow]:
    traj = rt.full_traj
    report = monitor_invariants(traj, rt.p, n=rt.cfg.samples)
    rows = []
    for r in report.rows:
        cid = f"sim-drift-{r.name}"
        if r.gated and r.name in SIM_TOLS:
            rows.append(_lt(cid, r.max_rel_drift, SIM_TOLS[r.name]))
        else:
            rows.append(_info(cid, r.max_rel_drift))
    _write_csv(os.path.join(outdir, "trajectory.csv"), ("t",) + STATE_FIELDS,
               np.column_stack([traj.times, traj.states]))
    return rows


def run_exact(rt: Runtime, outdir: str) -> list[ReportRow]:
    cfg = rt.cfg
    sol = rt.exact_sol
    rows = []
    if math.isnan(sol.first_integral_residual):
        rows.append(_info("exact-first-integral", 0.0))
    else:
        rows.append(_lt("exact-first-integral", sol.first_integral_residual, 1e-8))

    rng = np.random.default_rng(rt.seed)
    spot = rng.uniform(0.02 * cfg.t_end, 0.98 * cfg.t_end, 12)
    h = 1e-5
    worst = 0.0
    for t in spot:
        dy_fd = (sol.state(t - 2 * h) - 8.0 * sol.state(t - h)
                 + 8.0 * sol.state(t + h) - sol.state(t + 2 * h)) / (12.0 * h)
        dy = rhs(sol.dyn_state(t), rt.p)
        worst = max(worst, float(np.max(np.abs(dy_fd - dy))))
    rows.append(_lt("exact-rhs-consistency", worst, 1e-6))

    full = rt.full_traj
    diff = 0.0
    for t, y in zip(full.times, full.states):
        diff = max(diff, float(np.max(np.abs(y - sol.state(t)))))
    rows.append(_lt("exact-vs-full", diff, 1e-7))

    z0 = to_modulated(rt.state0, rt.p)
    mtraj = integrate_modulated(z0, rt.p, rt.ints.c0, cfg.t_end, cfg.tol,
                                cfg.samples)
    mdiff = 0.0
    for t, z in zip(mtraj.times, mtraj.states):
        zf = to_modulated(full.dyn_state(t), rt.p).as_array()
        mdiff = max(mdiff, float(np.max(np.abs(z - zf))))
    rows.append(_lt("exact-vs-modulated", mdiff, 1e-7))

    ts = np.linspace(0.0, cfg.t_end, cfg.samples)
    _write_csv(os.path.join(outdir, "exact_scalar.csv"),
               ("t", "Omega", "OmegaDot", "phi", "theta"),
               np.column_stack([ts, np.array([sol.scalar(t) for t in ts])]))
    return rows


def run_residuals(rt: Runtime, outdir: str) -> list[ReportRow]:
    traj = rt.full_traj
    rep = pde_residuals(traj, rt.p, rt.cfg.grid, rt.cfg.translation)
    rows = []
    for name, r in rep.rows.items():
        if name == "div-H":
            rows.append(_le("res-div-H", r.value, 0.0))
        elif name.endswith("-fd"):
            rows.append(_lt(f"res-{name}", r.value, 1e-4))
        else:
            rows.append(_lt(f"res-{name}", r.value, 1e-6))
    neg = field_negative_control(traj, rt.p, rt.cfg.grid, rt.cfg.translation)
    rows.append(_gt("res-negative-control", neg, 1e-2))
    return rows


def run_lax(rt: Runtime, outdir: str) -> list[ReportRow]:
    traj = rt.full_traj
    rep = laxmod.compatibility_residual(traj, rt.p, rt.cfg.lambdas)
    rows = [
        _lt("lax-pair-q", rep.pair_q, 1e-5),
        _lt("lax-pair-l", rep.pair_l, 1e-5),
    ]
    for lam in rt.cfg.lambdas:
        rows.append(_lt(f"lax-compat-lam{lam:+g}", rep.compat[lam], 1e-5))
    rows.append(_lt("lax-det-drift", rep.worst_det_drift, 1e-7))
    rows.append(_lt("lax-quartic-coeff", rep.quartic_coeff_dev, 1e-7))
    rows.append(_lt("lax-trace", rep.trace_max, 1e-12))
    rows.append(_lt("lax-sigma", laxmod.sigma_residual(traj, rt.p), 1e-4))
    rows.append(_gt("lax-negative-control",
                    laxmod.negative_control(traj, rt.p), 1e-2))
    return rows


def run_ermakov(rt: Runtime, outdir: str) -> list[ReportRow]:
    sol = rt.exact_sol
    ints, p = rt.ints, rt.p
    rep = erm.ermakov_residual(sol, ints, p)
    rows = [
        _lt("erm-residual-1", float(np.max(np.abs(rep.res1))), 1e-5),
        _lt("erm-residual-2", float(np.max(np.abs(rep.res2))), 1e-5),
    ]
    H0 = rep.H[0]
    rows.append(_lt("erm-H-drift", rep.H_spread / max(abs(H0), 1e-12), 1e-7))
    target = erm.hamiltonian_target(ints, p.f)
    vdev = abs(float(np.mean(rep.H)) - target) / max(abs(target), 1e-12)
    if abs(ints.delta + ints.cIV) <= 1e-12 * max(1.0, abs(ints.delta)):
        rows.append(_lt("erm-H-value", vdev, 1e-7))
    else:
        rows.append(_info("erm-H-value", vdev))

    rng = np.random.default_rng(rt.seed)
    zdev = 0.0
    for t in rng.uniform(0.02 * rt.cfg.t_end, 0.98 * rt.cfg.t_end, 12):
        om, omd = sol.scalar(t)[0], sol.scalar(t)[1]
        sa = erm.semi_axes(om, omd, ints)
        zdev = max(zdev, abs(erm.z_from_axes(sa) - erm.z_from_omega(om, omd, ints)))
    rows.append(_lt("erm-z-agreement", zdev, 1e-8))

    irr = rt.cfg.irrotational
    if irr is not None:
        cstarI, cstarII = erm.cstar_constants(
            irr["cI_pow"], irr["cII_pow"], irr["cIII"], irr["cIIIstar"],
            p.alpha, p.m)
        init = irr["initial"]
        y0 = (init["a"], init["b"], init["aDot"], init["bDot"])
        itraj = erm.integrate_irrotational(y0, cstarI, cstarII,
                                           irr["t_end"], irr["tol"])
        ts, ys = itraj.sample(201)
        inv = np.array([erm.ray_reid_invariant(y, cstarI, cstarII) for y in ys])
        rows.append(_lt("irr-ray-reid-drift",
                        float(np.max(np.abs(inv - inv[0]))) / max(abs(inv[0]), 1e-12),
                        1e-9))
        disp = np.array([erm.irrotational_hamiltonian(
            y, irr["cI_pow"], irr["cII_pow"], cstarI, cstarII) for y in ys])
        rows.append(_info("irr-displayed-H-drift",
                          float(np.max(np.abs(disp - disp[0]))) / max(abs(disp[0]), 1e-12)))
        comp = np.array([erm.companion_invariant(y, cstarI, cstarII) for y in ys])
        rows.append(_info("irr-companion-drift",
                          float(np.max(np.abs(comp - comp[0]))) / max(abs(comp[0]), 1e-12)))
        _write_csv(os.path.join(outdir, "irrotational.csv"),
                   ("t", "a", "b", "aDot", "bDot"),
                   np.column_stack([ts, ys]))
    return rows


RUNNERS = {
    "simulate": run_simulate,
    "exact": run_exact,
    "residuals": run_residuals,
    "lax": run_lax,
    "ermakov": run_ermakov,
}


def _emit(outdir: str, sub: str, rows: list[ReportRow], quiet: bool) -> None:
    text = "".join(r.line() + "\n" for r in rows)
    with open(os.path.join(outdir, f"report_{sub}.txt"), "w") as fh:
        fh.write(text)
    if not quiet:
        print(text, end="")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="pulsrodon",
        description="Pulsating-rotating vortex laboratory: integrate, "
                    "construct and verify.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS + ("all",):
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="scenario YAML file")
        sp.add_argument("--outdir", default="out", help="output directory")
        sp.add_argument("--quiet", action="store_true")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2

    os.makedirs(args.outdir, exist_ok=True)
    rt = Runtime(cfg)
    try:
        if args.command == "all":
            rows = []
            for name in SUBCOMMANDS:
                if cfg.checks.get(name):
                    part = RUNNERS[name](rt, args.outdir)
                    _emit(args.outdir, name, part, quiet=True)
                    rows.extend(part)
            _emit(args.outdir, "all", rows, args.quiet)
        else:
            if not cfg.checks.get(args.command):
                print(f"config error: suite '{args.command}' is disabled for "
                      f"scenario '{cfg.name}'", file=sys.stderr)
                return 2
            rows = RUNNERS[args.command](rt, args.outdir)
            _emit(args.outdir, args.command, rows, args.quiet)
    except PulsrodonError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    return 1 if any(r.status == "fail" for r in rows) else 0


if __name__ == "__main__":
    sys.exit(main())
