"""Unit tests for the command-line interface."""

import json
import textwrap

import pytest

from fpsteady import cli


def _write(tmp_path, name, body):
    path = tmp_path / name
    path.write_text(textwrap.dedent(body))
    return str(path)


TRIVIAL_TRANSMON = """\
    schema_version = 1
    model = "transmon_cavity"
    observables = ["b_moment_0_0", "b_moment_1_1", "a_moment_0_1"]

    [fixed]
    delta_c = 0.0
    delta_ct = 0.0
    g = 2.0
    chi = -1.5
    gamma_c = 1.0
    gamma_t = 0.1
    epsilon = 0.0
"""


def test_point_zero_drive(tmp_path, capsys):
    cfg = _write(tmp_path, "pt.toml", TRIVIAL_TRANSMON)
    assert cli.main(["point", cfg]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["b_moment_0_0"] == {"re": 1.0, "im": 0.0}
    assert out["b_moment_1_1"] == {"re": 0.0, "im": 0.0}
    assert out["a_moment_0_1"] == {"re": 0.0, "im": 0.0}


def test_point_domain_failure(tmp_path, capsys):
    cfg = _write(tmp_path, "bad.toml", TRIVIAL_TRANSMON.replace(
        "chi = -1.5", "chi = 0.0"))
    assert cli.main(["point", cfg]) == 1
    out = json.loads(capsys.readouterr().out)
    assert out["error"] == "DomainError"


def test_sweep_subcommand_writes_csv(tmp_path, capsys):
    cfg = _write(tmp_path, "sw.toml", f"""\
        schema_version = 1
        model = "parametric_duffing"
        observables = ["moment_1_1", "dx_min"]

        [fixed]
        delta = 0.0
        eps1 = 0.0
        u = 0.5
        gamma1 = 1.0

        [[axes]]
        name = "eps2"
        min = 0.2
        max = 0.8
        count = 4

        [output]
        format = "csv"
        prefix = "{tmp_path / 'sw'}"
    """)
    assert cli.main(["sweep", cfg]) == 0
    printed = capsys.readouterr().out.splitlines()
    assert printed == [str(tmp_path / "sw.csv")]
    lines = (tmp_path / "sw.csv").read_text().splitlines()
    header = next(line for line in lines if not line.startswith("#"))
    assert header.split(",")[0] == "eps2"
    assert "dx_min" in header
    assert sum(1 for line in lines if not line.startswith("#")) == 5


def test_sweep_prefix_override(tmp_path, capsys):
    cfg = _write(tmp_path, "sw.toml", f"""\
        schema_version = 1
        model = "parametric_duffing"
        observables = ["moment_1_1"]

        [fixed]
        delta = 0.0
        eps1 = 0.0
        eps2 = 0.5
        u = 0.5
        gamma1 = 1.0
    """)
    alt = tmp_path / "alt" / "run"
    assert cli.main(["sweep", cfg, "--prefix", str(alt)]) == 0
    capsys.readouterr()
    assert (tmp_path / "alt" / "run.csv").exists()


def test_config_error_exit_code(tmp_path, capsys):
    cfg = _write(tmp_path, "bad.toml", "schema_version = 99\n")
    assert cli.main(["sweep", cfg]) == 2
    assert "ConfigError" in capsys.readouterr().err


def test_missing_file_exit_code(tmp_path, capsys):
    assert cli.main(["sweep", str(tmp_path / "nope.toml")]) == 2
    assert "IO error" in capsys.readouterr().err


def test_phase_diagram_subcommand(tmp_path, capsys):
    prefix = tmp_path / "pd"
    assert cli.main(["phase-diagram", "--count", "40",
                     "--prefix", str(prefix)]) == 0
    capsys.readouterr()
    assert (tmp_path / "pd.csv").exists()
    pgm = (tmp_path / "pd_phase.pgm").read_bytes()
    assert pgm.startswith(b"P5\n40 40\n255\n")


def test_validate_subcommand(capsys):
    assert cli.main(["validate"]) == 0
    out = capsys.readouterr().out
    assert "all checks passed" in out
    assert "FAIL" not in out


def test_figures_subset(tmp_path, capsys):
    assert cli.main(["figures", "--outdir", str(tmp_path / "figs"),
                     "--only", "phase_diagram"]) == 0
    capsys.readouterr()
    names = sorted(p.name for p in (tmp_path / "figs").iterdir())
    assert names == ["phase_diagram.csv", "phase_diagram.png",
                     "phase_diagram_phase.pgm"]
