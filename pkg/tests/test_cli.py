import json
import logging
import math
import subprocess
import sys

import numpy as np
import pytest

from qlheat import PhysParams, effective_diffusivity, linear_flux, modified_flux
from qlheat.cli import main, parse_config, run
from qlheat.errors import NonPhysicalParameterWarning, ParseError, ValidationError

BASE = """\
# similarity scenario
mode = similarity
B = 1
C = -1
a_squared = 0.001
z_max = 5
"""

SMALL_PDE = """\
mode = {mode}
B = 1
C = -1
a_squared = 0.001
x_max = 3
dx = 1/40
t_end = 0.5
output_times = 0.25, 0.5
"""


def read_csv(path):
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# ")
    header = lines[1].split(",")
    rows = [line.split(",") for line in lines[2:]]
    return lines[0], header, rows


def column(rows, header, name):
    i = header.index(name)
    return np.array([float(r[i]) for r in rows])


# -- parsing -----------------------------------------------------------------------

def test_minimal_config_defaults():
    cfg = parse_config(BASE)
    assert cfg.mode == "similarity"
    assert cfg.params.D_T == 1.0
    assert cfg.params.a == math.sqrt(0.001)
    assert cfg.dx == 1 / 400
    assert cfg.cfl_safety == 0.5
    assert cfg.front_times == (0.25, 1.0, 4.0)
    assert set(cfg.given) == {"mode", "B", "C", "a_squared", "z_max"}


def test_fractions_and_lists():
    cfg = parse_config(SMALL_PDE.format(mode="pde"))
    assert cfg.dx == 1 / 40
    assert cfg.output_times == (0.25, 0.5)


def test_material_constants():
    cfg = parse_config("mode=flux-table\na=0.05\nlambda=2\nc=4\nrho=0.5\n")
    assert (cfg.params.D_T, cfg.params.lam) == (1.0, 2.0)
    with pytest.raises(ValidationError):
        parse_config("mode=flux-table\na=0.05\nlambda=2\nc=4\nrho=0.5\nD_T=3\n")
    with pytest.raises(ValidationError):
        parse_config("mode=flux-table\na=0.05\nlambda=2\n")


@pytest.mark.parametrize("text,fragment", [
    (BASE.replace("a_squared = 0.001", "a_squared = -1"), "a_squared"),
    (BASE + "a = 0.1\n", "only one"),
    (BASE.replace("C = -1", "C = 0"), "nonzero"),
    (BASE.replace("mode = similarity", "mode = shooting"), "mode"),
    (BASE.replace("B = 1\n", ""), "'B'"),
    (SMALL_PDE.format(mode="pde").replace("0.25, 0.5", "0.25, 0.75"), "output_times"),
    (SMALL_PDE.format(mode="pde") + "cfl_safety = 2\n", "cfl_safety"),
])
def test_validation_errors(text, fragment):
    with pytest.raises(ValidationError, match=fragment):
        parse_config(text)


@pytest.mark.parametrize("text,line,key", [
    (BASE + "colour = red\n", 7, "colour"),
    (BASE + "B = 2\n", 7, "B"),
    (BASE + "just words\n", 7, None),
    (BASE + "dx =\n", 7, "dx"),
    (BASE + "dx = fast\n", 7, "dx"),
    (BASE + "n_output = 1.5\n", 7, "n_output"),
])
def test_parse_errors_carry_location(text, line, key):
    with pytest.raises(ParseError) as info:
        parse_config(text)
    assert info.value.line == line
    assert info.value.key == key
    assert f"line {line}" in str(info.value)


def test_nonphysical_a_warns():
    with pytest.warns(NonPhysicalParameterWarning):
        cfg = parse_config(BASE.replace("a_squared = 0.001", "a = 0.5"))
    assert cfg.params.a == 0.5


def test_override_wins_and_is_logged(caplog):
    with caplog.at_level(logging.WARNING, logger="qlheat"):
        cfg = parse_config(BASE, {"B": "2", "dx": "1/100"})
    assert cfg.B == 2.0 and cfg.dx == 0.01
    assert any("B=2" in r.getMessage() for r in caplog.records)
    assert not any("dx=" in r.getMessage() for r in caplog.records)
    with pytest.raises(ParseError):
        parse_config(BASE, {"nope": "1"})


# -- running -----------------------------------------------------------------------

def test_similarity_mode(tmp_path):
    cfg = parse_config(BASE)
    result = run(cfg, tmp_path)
    assert result.status == 0
    assert sorted(p.name for p in result.files) == ["front.csv", "profile.csv"]
    comment, header, rows = read_csv(tmp_path / "front.csv")
    assert header == ["t", "z0", "x0", "V0"]
    assert "a_squared=0.001" in comment and "mode=similarity" in comment
    z0 = column(rows, header, "z0")
    assert np.all(np.abs(z0 - 1.55) <= 0.02)
    _, ph, prow = read_csv(tmp_path / "profile.csv")
    assert ph == ["z", "f", "fp"]
    z = column(prow, ph, "z")
    assert z[0] == 0.0 and np.all(np.diff(z) > 0)
    assert column(prow, ph, "f")[0] == 1.0


def test_flux_table_mode(tmp_path):
    cfg = parse_config("mode = flux-table\na_squared = 0.001\n")
    run(cfg, tmp_path)
    _, header, rows = read_csv(tmp_path / "flux_table.csv")
    assert header == ["g", "J_linear", "J_modified", "gap", "D_eff"]
    g = column(rows, header, "g")
    assert g[0] == 0.0 and len(g) == 15
    assert column(rows, header, "gap")[0] == 0.0
    assert column(rows, header, "D_eff")[0] == 0.0
    p = cfg.params
    np.testing.assert_array_equal(column(rows, header, "J_modified"), modified_flux(g, p))
    np.testing.assert_array_equal(column(rows, header, "J_linear"), linear_flux(g, p))
    np.testing.assert_array_equal(column(rows, header, "D_eff"),
                                  effective_diffusivity(g, p))


@pytest.mark.parametrize("mode,col", [("pde", "T"), ("linear", "T"), ("gradient-form", "H")])
def test_pde_modes(tmp_path, mode, col):
    with pytest.warns(Warning) if mode == "linear" else _no_op():
        run(parse_config(SMALL_PDE.format(mode=mode)), tmp_path)
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["front_trajectory.csv", "snapshot_0.25.csv", "snapshot_0.5.csv"]
    _, header, rows = read_csv(tmp_path / "snapshot_0.5.csv")
    assert header == ["x", col]
    assert len(rows) == 121
    _, th, trows = read_csv(tmp_path / "front_trajectory.csv")
    assert th == ["t", "x_front", "V_estimate"]
    assert list(column(trows, th, "t")) == [0.25, 0.5]


class _no_op:
    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False


def test_compare_mode(tmp_path):
    from qlheat import analysis, similarity
    cfg = parse_config(SMALL_PDE.format(mode="compare"))
    run(cfg, tmp_path)
    _, header, rows = read_csv(tmp_path / "crossval.csv")
    assert header == ["t", "error"]
    err = column(rows, header, "error")
    # same numbers as the library call
    from qlheat.cli import _solve_T
    report = _solve_T(cfg, cfg.output_times)
    prof = similarity.integrate_profile(1.0, -1.0, cfg.params, 5.0)
    assert err[-1] == analysis.cross_validate(report, prof, 0.5)


def test_symmetry_mode(tmp_path):
    text = SMALL_PDE.format(mode="symmetry").replace("output_times = 0.25, 0.5\n", "")
    text += "snapshot_count = 26\nsym_tau = 0.005\n"
    run(parse_config(text), tmp_path)
    _, header, rows = read_csv(tmp_path / "symmetry.csv")
    assert header == ["element", "tau", "xi", "theta", "eps", "residual", "ratio"]
    names = [r[0] for r in rows]
    assert names == ["identity", "time_shift", "space_shift", "temperature_shift",
                     "dilatation", "combined"]
    ratio = dict(zip(names, column(rows, header, "ratio")))
    assert ratio["identity"] == 1.0 and ratio["temperature_shift"] == 1.0


def test_outputs_deterministic(tmp_path):
    text = SMALL_PDE.format(mode="pde")
    run(parse_config(text), tmp_path / "a")
    run(parse_config(text), tmp_path / "b")
    for f in (tmp_path / "a").iterdir():
        assert f.read_bytes() == (tmp_path / "b" / f.name).read_bytes()


def test_csv_values_round_trip(tmp_path):
    cfg = parse_config(BASE)
    run(cfg, tmp_path)
    _, header, rows = read_csv(tmp_path / "profile.csv")
    from qlheat import integrate_profile
    prof = integrate_profile(1.0, -1.0, cfg.params, 5.0)
    np.testing.assert_array_equal(column(rows, header, "f"), prof.f)


def test_prefix_output(tmp_path):
    run(parse_config(BASE), str(tmp_path / "case1_"))
    assert (tmp_path / "case1_front.csv").exists()


# -- entry point ---------------------------------------------------------------------

def test_main_success(tmp_path):
    cfg = tmp_path / "s.cfg"
    cfg.write_text(BASE)
    assert main([str(cfg), "-o", str(tmp_path / "out") + "/"]) == 0
    assert (tmp_path / "out" / "front.csv").exists()


def test_main_config_error(tmp_path, capsys):
    cfg = tmp_path / "s.cfg"
    cfg.write_text(BASE + "bogus = 1\n")
    assert main([str(cfg)]) == 2
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["exit_code"] == 2 and err["error"] == "ParseError"
    assert main([str(tmp_path / "missing.cfg")]) == 2


def test_main_numerical_error(tmp_path, capsys):
    cfg = tmp_path / "s.cfg"
    cfg.write_text(BASE.replace("C = -1", "C = 1"))
    assert main([str(cfg), "-o", str(tmp_path) + "/"]) == 3
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err == {"error": "NoFront", "exit_code": 3, "message": err["message"]}


def test_main_override_flag(tmp_path):
    cfg = tmp_path / "s.cfg"
    cfg.write_text(BASE)
    out = tmp_path / "o"
    assert main([str(cfg), "-o", str(out) + "/", "--override", "front_times=2"]) == 0
    _, header, rows = read_csv(out / "front.csv")
    assert list(column(rows, header, "t")) == [2.0]


def test_module_invocation(tmp_path):
    cfg = tmp_path / "s.cfg"
    cfg.write_text("mode = flux-table\na = 0.05\n")
    proc = subprocess.run([sys.executable, "-m", "qlheat", str(cfg), "-o", str(tmp_path) + "/"],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "flux_table.csv").exists()
