import csv
import re
import textwrap

import numpy as np
import pytest

from pulsrodon.cli import Runtime, load_config, main
from pulsrodon.model import ConfigError

from conftest import config_path

LINE_RE = re.compile(r"^check [A-Za-z0-9+.-]+ status (pass|fail|info) value \S+ tol \S+$")


def write_config(tmp_path, text, name="scenario.yaml"):
    path = tmp_path / name
    path.write_text(textwrap.dedent(text))
    return str(path)


FIXED_POINT = """\
    schema_version: 1
    params: {m: 4.0, f: 1.0, alpha: 1.0, nu: 0.0}
    initial:
      kind: raw
      state: {rho0: 1.0, B: 0.0, B_S: 0.0, B_N: 0.0, G: 0.0,
              G_N: 0.0, G_S: 0.0, G_R: 0.0, Psi_flux: 1.0, Omega: 1.0}
    run: {t_end: 5.0, tol: 1.0e-10, samples: 51}
    checks: {simulate: true, residuals: false}
    """


def test_shipped_configs_load():
    main_cfg = load_config(config_path("constrained_demo.yaml"))
    assert main_cfg.initial_kind == "exact"
    assert all(main_cfg.checks.values())
    erm_cfg = load_config(config_path("ermakov_demo.yaml"))
    assert erm_cfg.checks["lax"] is False
    tr_cfg = load_config(config_path("transverse_demo.yaml"))
    assert tr_cfg.initial_kind == "raw"
    assert tr_cfg.params.branch == "transverse"
    assert not tr_cfg.checks["exact"]


def test_missing_required_param(tmp_path):
    path = write_config(tmp_path, """\
        schema_version: 1
        params: {f: 1.0}
        initial: {kind: raw, state: {rho0: 1.0, B: 0.0, B_S: 0.0, B_N: 0.0,
                  G: 0.0, G_N: 0.0, G_S: 0.0, G_R: 0.0, Psi_flux: 0.0, Omega: 1.0}}
        run: {t_end: 1.0}
        """)
    with pytest.raises(ConfigError, match="params block missing"):
        load_config(path)


def test_unknown_keys_rejected(tmp_path):
    path = write_config(tmp_path, """\
        schema_version: 1
        params: {m: 4.0, f: 1.0, spin: 3}
        initial: {kind: raw, state: {rho0: 1.0, B: 0.0, B_S: 0.0, B_N: 0.0,
                  G: 0.0, G_N: 0.0, G_S: 0.0, G_R: 0.0, Psi_flux: 0.0, Omega: 1.0}}
        run: {t_end: 1.0}
        """)
    with pytest.raises(ConfigError, match="unknown params keys"):
        load_config(path)


def test_schema_version_checked(tmp_path):
    path = write_config(tmp_path, FIXED_POINT.replace("schema_version: 1",
                                                      "schema_version: 3"))
    with pytest.raises(ConfigError, match="schema_version"):
        load_config(path)


def test_exact_kind_needs_all_integrals(tmp_path):
    path = write_config(tmp_path, """\
        schema_version: 1
        params: {m: 4.0, f: 1.0, nu: 1.0}
        initial:
          kind: exact
          integrals: {c0: 0.0, cI: 1.0, cII: -0.2}
        run: {t_end: 1.0}
        """)
    with pytest.raises(ConfigError, match="integrals missing keys"):
        load_config(path)


def test_malformed_yaml_exits_2(tmp_path, capsys):
    path = write_config(tmp_path, "params: [unclosed\n")
    assert main(["simulate", "--config", path, "--outdir", str(tmp_path)]) == 2
    assert "config error" in capsys.readouterr().err


def test_disabled_suite_exits_2(tmp_path, capsys):
    rc = main(["lax", "--config", config_path("transverse_demo.yaml"),
               "--outdir", str(tmp_path)])
    assert rc == 2
    assert "disabled" in capsys.readouterr().err


def test_fixed_point_scenario(tmp_path, capsys):
    path = write_config(tmp_path, FIXED_POINT)
    rc = main(["simulate", "--config", path, "--outdir", str(tmp_path),
               "--quiet"])
    assert rc == 0
    with open(tmp_path / "trajectory.csv") as fh:
        body = list(csv.reader(fh))[1:]
    rows = np.array([[float(v) for v in row] for row in body])
    assert rows.shape == (51, 11)
    assert np.max(np.abs(rows[:, 1:] - rows[0, 1:])) == 0.0


def test_report_lines_and_exit_1(tmp_path, capsys):
    # a sloppy integrator tolerance must surface as failed drift checks
    path = write_config(tmp_path, """\
        schema_version: 1
        params: {m: 4.0, f: 1.0, mu: 0.7, alpha: 1.0, nu: 1.2}
        initial:
          kind: exact
          integrals: {c0: 0.0, cI: 1.0, cII: -0.2, cIII: 4.2, cIV: 0.8, delta: -4.0}
          phi0: 0.3
        run: {t_end: 10.0, tol: 1.0e-3, samples: 101}
        checks: {simulate: true, exact: false, residuals: false, lax: false, ermakov: false}
        """)
    rc = main(["simulate", "--config", path, "--outdir", str(tmp_path)])
    out = capsys.readouterr().out
    lines = [ln for ln in out.splitlines() if ln.startswith("check ")]
    assert lines and all(LINE_RE.match(ln) for ln in lines)
    assert rc == 1
    assert any(" status fail " in ln for ln in lines)
    with open(tmp_path / "report_simulate.txt") as fh:
        assert [ln.rstrip("\n") for ln in fh] == lines


def test_seed_from_environment(monkeypatch):
    monkeypatch.setenv("PULSRODON_SEED", "7")
    rt = Runtime(load_config(config_path("transverse_demo.yaml")))
    assert rt.seed == 7
    monkeypatch.delenv("PULSRODON_SEED")
    rt = Runtime(load_config(config_path("transverse_demo.yaml")))
    assert rt.seed == 0
