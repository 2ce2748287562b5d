import csv
import io
import json
from dataclasses import replace

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fracheat import __version__
from fracheat.cli import EXIT_CONFIG, EXIT_DOMAIN, EXIT_OK, main, relative_differences
from fracheat.config import RunConfig, default_ini, load_config, parse_config
from fracheat.errors import ConfigError

import numpy as np

POLE_INI = "[constants]\ns_values = 0.25\neta_values = 0.75\nprelimit_ns = 100\n"


def _csv_rows(path):
    lines = [ln for ln in path.read_text().splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


def test_default_ini_round_trip():
    assert parse_config(default_ini()) == RunConfig()


def test_overrides_and_types():
    cfg = parse_config("[run]\njobs = 3\nstrict = yes\n[lift-converge]\nns = 8, 16\nprobes = 0,1; 0.5,2\n")
    assert cfg.jobs == 3 and cfg.strict is True
    assert cfg.lift_converge.ns == (8, 16)
    assert cfg.lift_converge.probes == ((0.0, 1.0), (0.5, 2.0))


@pytest.mark.parametrize(
    "text",
    [
        "[bogus]\n",
        "[run]\ncolour = red\n",
        "[xcheck]\nprobes = many\n",
        "[run]\nformat = xml\n",
        "[xcheck]\nmethods = fourier, magic\n",
        "[verify-carleman]\nvariants = thm3\n",
        "[lift-converge]\nprobes = 1,2,3\n",
        "not an ini file",
    ],
)
def test_bad_configs_raise(text):
    with pytest.raises(ConfigError):
        parse_config(text)


def test_digest_ignores_output_dir():
    a = RunConfig()
    assert a.digest() == replace(a, out_dir="elsewhere").digest()
    assert a.digest() != replace(a, jobs=2).digest()


@given(st.lists(st.floats(0.05, 0.95), min_size=1, max_size=4))
def test_digest_is_deterministic(values):
    text = "[constants]\ns_values = " + ", ".join(repr(v) for v in values) + "\n"
    assert parse_config(text).digest() == parse_config(text).digest()


def test_output_dir_environment(monkeypatch, tmp_path):
    monkeypatch.setenv("OUTPUT_DIR", str(tmp_path))
    assert load_config(None).out_dir == str(tmp_path)


def test_missing_config_file():
    with pytest.raises(ConfigError):
        load_config("/nonexistent/run.ini")


def test_relative_differences_floor():
    a = np.array([1.0, 1e-9, 0.5])
    b = np.array([1.0 + 1e-4, 0.0, 0.5])
    rel = relative_differences(a, b)
    assert rel[0] == pytest.approx(1e-4, rel=1e-3)
    assert rel[1] <= 1e-5
    assert rel[2] == 0
    tiny = relative_differences(np.array([3e-12, 4e-7]), np.array([0.0, 4e-7]), scale=1.0)
    assert tiny[0] <= 1e-5


def test_constants_command_and_provenance(tmp_path, capsys):
    ini = tmp_path / "p.ini"
    ini.write_text(POLE_INI)
    out = tmp_path / "out"
    assert main(["constants", "--config", str(ini), "--out", str(out), "--format", "both"]) == EXIT_OK
    text = (out / "constants.csv").read_text().splitlines()
    assert text[0] == f"#config-hash: {replace(parse_config(POLE_INI), format='both').digest()}"
    assert text[1] == f"#version: {__version__}"
    rows = _csv_rows(out / "constants.csv")
    pole = [r for r in rows if r["sign"] == "pole"]
    assert pole and pole[0]["name"] == "thm2_paper"
    json.loads((out / "constants.json").read_text())


def test_strict_pole_is_domain_exit(tmp_path):
    ini = tmp_path / "p.ini"
    ini.write_text(POLE_INI)
    assert main(["constants", "--config", str(ini), "--out", str(tmp_path / "o"), "--strict"]) == EXIT_DOMAIN


def test_config_errors_exit_two(tmp_path, capsys):
    bad = tmp_path / "b.ini"
    bad.write_text("[bogus]\n")
    assert main(["constants", "--config", str(bad)]) == EXIT_CONFIG
    assert main(["constants", "--jobs", "0"]) == EXIT_CONFIG
    assert "config error" in capsys.readouterr().err


def test_default_config_command(capsys):
    assert main(["default-config"]) == EXIT_OK
    assert parse_config(capsys.readouterr().out) == RunConfig()


def test_xcheck_command(tmp_path):
    ini = tmp_path / "x.ini"
    ini.write_text("[xcheck]\nspace_functions = gauss-a1\nspace_time_functions = egauss-a1-b1\ns_values = 0.5\nprobes = 4\n")
    out = tmp_path / "o"
    assert main(["xcheck", "--config", str(ini), "--out", str(out)]) == EXIT_OK
    rows = _csv_rows(out / "xcheck.csv")
    assert len(rows) == 3 * 4 + 4
    assert max(float(r["rel_diff"]) for r in rows) <= 1e-3


def test_verify_carleman_command(tmp_path):
    ini = tmp_path / "c.ini"
    ini.write_text("[verify-carleman]\nvariants = thm1_L2\ndims = 1\ns_values = 0.5\nthm1_eta_values = 0.6, 0.9\n")
    out = tmp_path / "o"
    assert main(["verify-carleman", "--config", str(ini), "--out", str(out), "--format", "both"]) == EXIT_OK
    rows = _csv_rows(out / "carleman.csv")
    assert [float(r["eta"]) for r in rows] == [0.6, 0.9]
    assert all(float(r["ratio"]) <= 1 for r in rows)
    assert json.loads((out / "carleman.json").read_text())["data"]["all_passed"] is True


def test_lift_converge_command(tmp_path):
    ini = tmp_path / "l.ini"
    ini.write_text("[lift-converge]\nns = 8, 32\nprobes = 0,1; 0.5,2\nfinal_tolerance = 0.5\n")
    out = tmp_path / "o"
    assert main(["lift-converge", "--config", str(ini), "--out", str(out)]) == EXIT_OK
    assert len(_csv_rows(out / "lift_converge.csv")) == 4


def test_parallel_jobs_give_identical_csv(tmp_path):
    ini = tmp_path / "c.ini"
    ini.write_text("[verify-carleman]\nvariants = thm1_L2\ndims = 1\ns_values = 0.25, 0.5\nthm1_eta_values = 0.9\n")
    outputs = []
    for jobs in ("1", "2"):
        out = tmp_path / f"o{jobs}"
        main(["verify-carleman", "--config", str(ini), "--out", str(out), "--jobs", jobs])
        outputs.append((out / "carleman.csv").read_text().splitlines()[1:])
    # the config hash line differs because jobs is part of the configuration
    assert outputs[0] == outputs[1]
