"""Acceptance gates for the primary deliverable.

Each test covers one numbered gate at its contractual tolerance and prints
a single [PRIMARY n] PASS line with the measured values; a failed assert
is the corresponding FAIL line.  Rows come from running the report suites
on the shipped scenario configs, so the gates exercise exactly what the
CLI ships.
"""

import filecmp
import math
import os
import time

import pytest

from pulsrodon.cli import RUNNERS, SUBCOMMANDS, main

from conftest import config_path


def _collect(rt, outdir):
    rows = {}
    for name in SUBCOMMANDS:
        if rt.cfg.checks.get(name):
            for r in RUNNERS[name](rt, str(outdir)):
                rows[r.check_id] = r
    return rows


@pytest.fixture(scope="session")
def main_rows(main_rt, tmp_path_factory):
    return _collect(main_rt, tmp_path_factory.mktemp("acc_main"))


@pytest.fixture(scope="session")
def erm_rows(erm_rt, tmp_path_factory):
    return _collect(erm_rt, tmp_path_factory.mktemp("acc_erm"))


def announce(capsys, n, text):
    with capsys.disabled():
        print(f"\n[PRIMARY {n}] PASS {text}", flush=True)


def test_primary_1_invariant_conservation(main_rt, main_rows, capsys):
    p, cfg = main_rt.p, main_rt.cfg
    assert (p.m, p.f, p.alpha) == (4.0, 1.0, 1.0)
    assert cfg.tol == 1e-10 and cfg.t_end == 10.0
    worst_c = 0.0
    for name in ("cII", "cIII", "cIV", "delta"):
        row = main_rows[f"sim-drift-{name}"]
        assert row.value < 1e-7, f"{row.check_id} drift {row.value:g}"
        worst_c = max(worst_c, row.value)
    worst_p = 0.0
    for name in ("M-product", "Q-product"):
        row = main_rows[f"sim-drift-{name}"]
        assert row.value < 1e-6, f"{row.check_id} drift {row.value:g}"
        worst_p = max(worst_p, row.value)
    announce(capsys, 1, f"invariant drift {worst_c:.3g} (tol 1e-7), "
                        f"theorem-1 products {worst_p:.3g} (tol 1e-6)")


def test_primary_2_reduction_equivalence(main_rows, capsys):
    mrow = main_rows["exact-vs-modulated"]
    frow = main_rows["exact-vs-full"]
    assert mrow.value < 1e-7, f"modulated route differs by {mrow.value:g}"
    assert frow.value < 1e-7, f"full route differs by {frow.value:g}"
    announce(capsys, 2, f"full vs modulated {mrow.value:.3g}, "
                        f"vs built state {frow.value:.3g} (tol 1e-7)")


def test_primary_3_exact_solution_verification(main_rows, capsys):
    rc = main_rows["exact-rhs-consistency"]
    assert rc.value < 1e-6, f"rhs consistency {rc.value:g}"
    worst = 0.0
    for name in ("mass", "mom-full-x", "mom-full-y", "mom-reduced-x",
                 "mom-reduced-y", "flux", "entropy", "energy"):
        row = main_rows[f"res-{name}"]
        assert row.value < 1e-6, f"{row.check_id} residual {row.value:g}"
        worst = max(worst, row.value)
    assert main_rows["res-div-H"].value == 0.0
    neg = main_rows["res-negative-control"]
    assert neg.value > 1e-2, f"negative control too quiet: {neg.value:g}"
    announce(capsys, 3, f"rhs consistency {rc.value:.3g}, grid residuals "
                        f"{worst:.3g} (tol 1e-6), div H exactly 0, "
                        f"negative control {neg.value:.3g} (> 1e-2)")


def test_primary_4_amplitude_dual_route(main_rt, main_rows, capsys):
    ints = main_rt.ints
    f = main_rt.p.f
    lhs = ints.cIV**2 - 4.0 * ints.cII * ints.cIII
    rhs_v = ints.delta**2 * f**2 / 4.0
    assert abs(lhs - rhs_v) / max(abs(lhs), abs(rhs_v)) < 1e-7
    k_expected = (2.0 * ints.c0 * ints.cIV
                  - 4.0 * ints.alpha * ints.cII * ints.delta) / ints.delta**2
    assert ints.k == pytest.approx(k_expected, rel=1e-12)
    row = main_rows["exact-first-integral"]
    assert row.status == "pass" and row.value < 1e-8
    announce(capsys, 4, f"first-integral residual {row.value:.3g} (tol 1e-8) "
                        f"with consistent constants")


def test_primary_5_ermakov_structure(main_rows, erm_rows, capsys):
    worst = 0.0
    for rows in (main_rows, erm_rows):
        for name in ("erm-residual-1", "erm-residual-2"):
            row = rows[name]
            assert row.value < 1e-5, f"{row.check_id} {row.value:g}"
            worst = max(worst, row.value)
    hd = erm_rows["erm-H-drift"]
    hv = erm_rows["erm-H-value"]
    assert hd.value < 1e-7, f"H drift {hd.value:g}"
    assert hv.status == "pass" and hv.value < 1e-7, f"H off target {hv.value:g}"
    rr = main_rows["irr-ray-reid-drift"]
    assert rr.value < 1e-9, f"Ray-Reid invariant drift {rr.value:g}"
    announce(capsys, 5, f"pair residuals {worst:.3g} (tol 1e-5), H on target "
                        f"{hv.value:.3g} (tol 1e-7), Ray-Reid {rr.value:.3g} "
                        f"(tol 1e-9)")


def test_primary_6_operator_pair(main_rt, main_rows, capsys):
    worst = 0.0
    for lam in main_rt.cfg.lambdas:
        row = main_rows[f"lax-compat-lam{lam:+g}"]
        assert row.value < 1e-5, f"{row.check_id} {row.value:g}"
        worst = max(worst, row.value)
    dd = main_rows["lax-det-drift"]
    assert dd.value < 1e-7, f"det drift {dd.value:g}"
    sg = main_rows["lax-sigma"]
    assert sg.value < 1e-4, f"inverse-amplitude residual {sg.value:g}"
    neg = main_rows["lax-negative-control"]
    assert neg.value > 1e-2, f"negative control too quiet: {neg.value:g}"
    announce(capsys, 6, f"compatibility {worst:.3g} (tol 1e-5), det drift "
                        f"{dd.value:.3g} (tol 1e-7), sigma {sg.value:.3g} "
                        f"(tol 1e-4), negative control {neg.value:.3g}")


def test_primary_7_ungated_measurements(main_rows, erm_rows, capsys):
    vals = []
    for rows, tag in ((main_rows, "main"), (erm_rows, "ermakov")):
        cv = rows["sim-drift-cV"]
        assert cv.status == "info" and cv.tol is None
        assert math.isfinite(cv.value)
        vals.append(f"cV[{tag}] {cv.value:.3g}")
    hh = main_rows["irr-displayed-H-drift"]
    assert hh.status == "info" and hh.tol is None
    assert math.isfinite(hh.value)
    vals.append(f"displayed-H {hh.value:.3g}")
    announce(capsys, 7, "reported without gating: " + ", ".join(vals))


def test_primary_8_determinism(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("PULSRODON_SEED", "0")
    cfg = config_path("constrained_demo.yaml")
    durs = []
    for sub in ("one", "two"):
        d = tmp_path / sub
        t0 = time.perf_counter()
        assert main(["all", "--config", cfg, "--outdir", str(d),
                     "--quiet"]) == 0
        durs.append(time.perf_counter() - t0)
        assert durs[-1] < 60.0, f"suite took {durs[-1]:.1f}s"
    names = sorted(os.listdir(tmp_path / "one"))
    assert names == sorted(os.listdir(tmp_path / "two"))
    match, mismatch, errors = filecmp.cmpfiles(
        tmp_path / "one", tmp_path / "two", names, shallow=False)
    assert not mismatch and not errors, f"differing outputs: {mismatch or errors}"
    announce(capsys, 8, f"two runs byte-identical across {len(names)} files "
                        f"({durs[0]:.1f}s and {durs[1]:.1f}s, bound 60s)")


def test_other_scenarios_pass(tmp_path):
    for name in ("ermakov_demo.yaml", "transverse_demo.yaml"):
        rc = main(["all", "--config", config_path(name),
                   "--outdir", str(tmp_path / name), "--quiet"])
        assert rc == 0, f"{name} exited {rc}"
