"""Command-line front end.

Usage::

    qlheat scenario.cfg [-o OUTPUT_PREFIX] [--override key=value ...]

The scenario file is a flat ``key = value`` document; ``#`` starts a comment.
Every CSV written starts with a ``# key=value ...`` line recording the
parameter set, followed by the column header.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import analysis, pde_solver, similarity
from .errors import ConfigError, NumericalError, ParseError, QlheatError, ValidationError
from .flux_law import (PhysParams, effective_diffusivity, flux_gap,
                       linear_flux, modified_flux)

log = logging.getLogger("qlheat")

MODES = ("similarity", "pde", "linear", "gradient-form", "compare", "symmetry",
         "flux-table")

# key -> (kind, default); kind is "float", "int", "str" or "floats"
KEYS = {
    "mode": ("str", None),
    "D_T": ("float", None),
    "a": ("float", None),
    "a_squared": ("float", None),
    "lambda": ("float", None),
    "c": ("float", None),
    "rho": ("float", None),
    "B": ("float", None),
    "C": ("float", None),
    "z_max": ("float", 5.0),
    "x_max": ("float", 8.0),
    "dx": ("float", 1 / 400),
    "t_end": ("float", 1.0),
    "output_times": ("floats", None),
    "front_times": ("floats", (0.25, 1.0, 4.0)),
    "rtol": ("float", 1e-10),
    "atol": ("float", 1e-10),
    "n_output": ("int", 1001),
    "cfl_safety": ("float", pde_solver.CFL_SAFETY),
    "g_values": ("floats", None),
    "snapshot_start": ("float", None),
    "snapshot_count": ("int", 101),
    "sym_tau": ("float", 0.0025),
    "sym_xi": ("float", 0.1234),
    "sym_theta": ("float", 0.5),
    "sym_eps": ("float", 0.1),
    "output": ("str", "."),
}


@dataclass
class ScenarioConfig:
    mode: str
    params: PhysParams | None
    values: dict  # every key, defaults filled in
    given: dict = field(default_factory=dict)  # keys present in the input

    def __getattr__(self, name):
        values = self.__dict__.get("values", {})
        if name in values:
            return values[name]
        raise AttributeError(name)

    def describe(self) -> str:
        """One-line record of the full parameter set for CSV headers."""
        parts = []
        for key in KEYS:
            v = self.values.get(key)
            if v is None:
                continue
            if isinstance(v, tuple):
                v = ",".join(repr(float(x)) for x in v)
            elif isinstance(v, float):
                v = repr(v)
            parts.append(f"{key}={v}")
        return " ".join(parts)


def _parse_number(text):
    text = text.strip()
    try:
        if "/" in text:
            return float(Fraction(text))
        return float(text)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"not a number: {text!r}")


def _convert(key, raw):
    kind = KEYS[key][0]
    if kind == "str":
        return raw.strip()
    if kind == "int":
        v = _parse_number(raw)
        if v != int(v):
            raise ValueError(f"not an integer: {raw!r}")
        return int(v)
    if kind == "float":
        return _parse_number(raw)
    items = [s for s in raw.replace(";", ",").split(",") if s.strip()]
    return tuple(_parse_number(s) for s in items)


def _read_pairs(text):
    pairs = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError("expected 'key = value'", line=lineno)
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in KEYS:
            raise ParseError("unknown key", line=lineno, key=key)
        if key in pairs:
            raise ParseError("duplicate key", line=lineno, key=key)
        if not raw:
            raise ParseError("missing value", line=lineno, key=key)
        try:
            pairs[key] = (_convert(key, raw), lineno)
        except ValueError as exc:
            raise ParseError(str(exc), line=lineno, key=key) from None
    return pairs


def _require(cond, message):
    if not cond:
        raise ValidationError(message)


def _build_params(v):
    a, a2 = v["a"], v["a_squared"]
    _require(a is not None or a2 is not None, "one of 'a' or 'a_squared' is required")
    _require(a is None or a2 is None, "give only one of 'a' and 'a_squared'")
    if a2 is not None:
        _require(a2 > 0, f"a_squared must be > 0 (a > 0 required), got {a2!r}")
        a = math.sqrt(a2)
    _require(a > 0 and math.isfinite(a), f"a must be > 0, got {a!r}")
    lam, c, rho, D_T = v["lambda"], v["c"], v["rho"], v["D_T"]
    material = (lam, c, rho)
    _require(all(m is None for m in material) or all(m is not None for m in material),
             "'lambda', 'c' and 'rho' must be given together")
    if lam is None:
        D_T = 1.0 if D_T is None else D_T
        _require(D_T > 0, f"D_T must be > 0, got {D_T!r}")
        return PhysParams.from_diffusivity(D_T, a)
    _require(lam > 0 and c > 0 and rho > 0, "lambda, c and rho must be > 0")
    if D_T is None:
        D_T = lam / (c * rho)
    try:
        return PhysParams(D_T=D_T, a=a, lam=lam, c=c, rho=rho)
    except ValueError as exc:
        raise ValidationError(str(exc)) from None


def _validate(v):
    mode = v["mode"]
    _require(mode is not None, "'mode' is required")
    _require(mode in MODES, f"mode must be one of {', '.join(MODES)}; got {mode!r}")
    params = _build_params(v)
    v["D_T"] = params.D_T
    if mode != "flux-table":
        _require(v["B"] is not None, f"mode {mode} needs boundary value 'B'")
    if mode in ("similarity", "compare"):
        _require(v["C"] is not None, f"mode {mode} needs boundary slope 'C'")
        _require(v["C"] != 0, "boundary slope C must be nonzero")
        _require(v["z_max"] > 0, "z_max must be > 0")
        _require(v["rtol"] > 0 and v["atol"] > 0, "rtol and atol must be > 0")
        _require(v["n_output"] >= 2, "n_output must be >= 2")
    if mode == "similarity":
        _require(all(t > 0 for t in v["front_times"]), "front_times must be > 0")
    if mode in ("pde", "linear", "gradient-form", "compare", "symmetry"):
        _require(v["dx"] > 0, "dx must be > 0")
        _require(v["x_max"] >= 2 * v["dx"], "x_max must cover at least 3 nodes")
        _require(v["t_end"] > 0, "t_end must be > 0")
        _require(0 < v["cfl_safety"] <= 1, "cfl_safety must lie in (0, 1]")
        times = v["output_times"] or (v["t_end"],)
        _require(all(0 < t <= v["t_end"] for t in times),
                 "output_times must lie in (0, t_end]")
        v["output_times"] = tuple(sorted(set(times)))
    if mode == "symmetry":
        start = v["snapshot_start"]
        start = 0.5 * v["t_end"] if start is None else start
        _require(0 < start < v["t_end"], "snapshot_start must lie in (0, t_end)")
        _require(v["snapshot_count"] >= 3, "snapshot_count must be >= 3")
        v["snapshot_start"] = start
    if mode == "flux-table" and v["g_values"] is None:
        a = params.a
        v["g_values"] = (0.0,) + tuple(float(s * a * 10.0 ** k)
                                       for s in (1, -1) for k in range(-3, 4))
    return params


def parse_config(text: str, overrides=None) -> ScenarioConfig:
    """Parse and validate a scenario document.

    ``overrides`` maps keys to raw string values that replace entries of the
    document (the override wins and the collision is logged).
    Raises ParseError or ValidationError.
    """
    pairs = _read_pairs(text)
    for key, raw in (overrides or {}).items():
        if key not in KEYS:
            raise ParseError("unknown key in override", key=key)
        try:
            value = _convert(key, raw)
        except ValueError as exc:
            raise ParseError(str(exc), key=key) from None
        if key in pairs:
            log.warning("override %s=%s replaces config value %r (line %d)",
                        key, raw, pairs[key][0], pairs[key][1])
        pairs[key] = (value, None)
    values = {k: d for k, (_, d) in KEYS.items()}
    values.update({k: v for k, (v, _) in pairs.items()})
    params = _validate(values)
    return ScenarioConfig(mode=values["mode"], params=params, values=values,
                          given={k: v for k, (v, _) in pairs.items()})


# -- output ----------------------------------------------------------------

def _fmt(v):
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    if isinstance(v, str):
        return v
    return repr(float(v))


class _Writer:
    def __init__(self, prefix, config):
        # a Path always names a directory; a string ending in "/" too,
        # otherwise the string is a file-name prefix
        self.as_dir = isinstance(prefix, Path)
        self.prefix = str(prefix)
        self.comment = "# " + config.describe()
        self.files = []

    def path(self, name):
        p = self.prefix
        if self.as_dir or p.endswith(("/", os.sep)) or os.path.isdir(p):
            return Path(p) / name
        return Path(p + name)

    def write(self, name, header, rows):
        path = self.path(name)
        path.parent.mkdir(parents=True, exist_ok=True)
        lines = [self.comment, ",".join(header)]
        lines += [",".join(_fmt(v) for v in row) for row in rows]
        path.write_text("\n".join(lines) + "\n")
        self.files.append(path)
        return path


# -- modes -----------------------------------------------------------------

def _opts(cfg):
    return similarity.IntegrationOptions(rtol=cfg.rtol, atol=cfg.atol,
                                         n_output=cfg.n_output)


def _run_similarity(cfg, out):
    profile = similarity.integrate_profile(cfg.B, cfg.C, cfg.params, cfg.z_max,
                                           _opts(cfg))
    out.write("profile.csv", ["z", "f", "fp"],
              zip(profile.z, profile.f, profile.fp))
    info = similarity.locate_front(profile)
    rows = [(t, info.z0, info.position(t), info.velocity(t)) for t in cfg.front_times]
    out.write("front.csv", ["t", "z0", "x0", "V0"], rows)


def _grid(cfg):
    return pde_solver.Grid1D.uniform(cfg.x_max, cfg.dx)


def _write_pde_report(cfg, out, report, column):
    for snap in report.snapshots:
        out.write(f"snapshot_{_fmt(snap.t)}.csv", ["x", column],
                  zip(snap.x, snap.values))
    t = np.array([tf[0] for tf in report.front_trajectory])
    xf = np.array([tf[1] for tf in report.front_trajectory])
    v = np.gradient(xf, t) if t.size >= 2 else np.full(t.size, np.nan)
    out.write("front_trajectory.csv", ["t", "x_front", "V_estimate"], zip(t, xf, v))


def _solve_T(cfg, out_times, linear=False):
    solve = pde_solver.solve_linear if linear else pde_solver.solve_quasilinear
    bc = pde_solver.BoundarySpec.sqrt_time(cfg.B)
    return solve(pde_solver.Field.zeros(_grid(cfg)), bc, cfg.params, cfg.t_end,
                 out_times, cfl_safety=cfg.cfl_safety)


def _run_pde(cfg, out):
    _write_pde_report(cfg, out, _solve_T(cfg, cfg.output_times), "T")


def _run_linear(cfg, out):
    _write_pde_report(cfg, out, _solve_T(cfg, cfg.output_times, linear=True), "T")


def _run_gradient(cfg, out):
    report = pde_solver.solve_gradient_form(
        pde_solver.Field.zeros(_grid(cfg)), cfg.params, cfg.t_end,
        cfg.output_times, bc=pde_solver.GradientBC.for_sqrt_time(cfg.B),
        cfl_safety=cfg.cfl_safety)
    _write_pde_report(cfg, out, report, "H")


def _run_compare(cfg, out):
    profile = similarity.integrate_profile(cfg.B, cfg.C, cfg.params, cfg.z_max,
                                           _opts(cfg))
    report = _solve_T(cfg, cfg.output_times)
    rows = [(t, analysis.cross_validate(report, profile, t)) for t in cfg.output_times]
    out.write("crossval.csv", ["t", "error"], rows)


def _run_symmetry(cfg, out):
    times = np.linspace(cfg.snapshot_start, cfg.t_end, cfg.snapshot_count)
    report = _solve_T(cfg, times)
    G = analysis.GroupElement
    elements = [
        ("identity", G()),
        ("time_shift", G(tau=cfg.sym_tau)),
        ("space_shift", G(xi=cfg.sym_xi)),
        ("temperature_shift", G(theta=cfg.sym_theta)),
        ("dilatation", G(eps=cfg.sym_eps)),
        ("combined", G(tau=cfg.sym_tau, xi=cfg.sym_xi, theta=cfg.sym_theta,
                       eps=cfg.sym_eps)),
    ]
    base = analysis.symmetry_residual(G(), report, cfg.params)
    rows = []
    for name, g in elements:
        r = analysis.symmetry_residual(g, report, cfg.params)
        rows.append((name, g.tau, g.xi, g.theta, g.eps, r, r / base))
    out.write("symmetry.csv",
              ["element", "tau", "xi", "theta", "eps", "residual", "ratio"], rows)


def _run_flux_table(cfg, out):
    g = np.array(cfg.g_values, dtype=float)
    p = cfg.params
    rows = zip(g, linear_flux(g, p), modified_flux(g, p), flux_gap(g, p),
               effective_diffusivity(g, p))
    out.write("flux_table.csv", ["g", "J_linear", "J_modified", "gap", "D_eff"], rows)


RUNNERS = {
    "similarity": _run_similarity,
    "pde": _run_pde,
    "linear": _run_linear,
    "gradient-form": _run_gradient,
    "compare": _run_compare,
    "symmetry": _run_symmetry,
    "flux-table": _run_flux_table,
}


@dataclass
class RunResult:
    status: int
    files: list


def run(config: ScenarioConfig, output=None) -> RunResult:
    """Execute a validated scenario and write its CSV files."""
    out = _Writer(output if output is not None else config.output, config)
    RUNNERS[config.mode](config, out)
    return RunResult(0, out.files)


def _error_line(exc, code):
    return json.dumps({"error": type(exc).__name__, "exit_code": code,
                       "message": str(exc)})


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="qlheat", description=__doc__.split("\n")[0])
    parser.add_argument("config", help="scenario file (flat key = value)")
    parser.add_argument("-o", "--output", help="output prefix or directory")
    parser.add_argument("--override", action="append", default=[], metavar="KEY=VALUE",
                        help="replace one config key (repeatable)")
    parser.add_argument("-v", "--verbose", action="store_true")
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    logging.captureWarnings(True)

    try:
        overrides = {}
        for item in args.override:
            if "=" not in item:
                raise ParseError(f"override {item!r} is not KEY=VALUE")
            key, value = item.split("=", 1)
            overrides[key.strip()] = value
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read {args.config}: {exc}") from None
        config = parse_config(text, overrides)
    except ConfigError as exc:
        print(_error_line(exc, 2), file=sys.stderr)
        return 2

    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            result = run(config, args.output)
    except (NumericalError, QlheatError, FloatingPointError) as exc:
        print(_error_line(exc, 3), file=sys.stderr)
        return 3
    for path in result.files:
        log.info("wrote %s", path)
    return result.status


if __name__ == "__main__":
    sys.exit(main())
