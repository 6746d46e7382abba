"""End-to-end acceptance checks, one test per criterion.

Every test records a PASS/FAIL line that pytest prints in an
"acceptance criteria" section at the end of the run.
"""
import math
import time

import numpy as np
import pytest

from conftest import DX, X_MAX, record_criterion
from qlheat import (BoundarySpec, Field, GradientBC, GroupElement, Grid1D,
                    PhysParams, cross_validate, flux_gap, gradient_of,
                    integrate_profile, linear_flux, linear_oracle,
                    solve_gradient_form, solve_linear, step_linear,
                    step_quasilinear, symmetry_residual)
from qlheat.cli import main, parse_config, run
from qlheat.pde_solver import max_stable_dt

SCENARIO = """\
mode = similarity
B = 1
C = -1
a_squared = 0.001
D_T = 1
z_max = 5
front_times = 0.25, 1, 4
"""


def _front_csv(path):
    lines = path.read_text().splitlines()
    header = lines[1].split(",")
    return {h: np.array([float(r.split(",")[i]) for r in lines[2:]])
            for i, h in enumerate(header)}


def test_criterion_1_front_location(tmp_path):
    start = time.perf_counter()
    run(parse_config(SCENARIO), tmp_path)
    seconds = time.perf_counter() - start
    z0 = _front_csv(tmp_path / "front.csv")["z0"][0]
    ok = 1.53 <= z0 <= 1.57 and seconds < 1.0
    record_criterion(1, "front location", ok,
                     f"z0={z0:.10f} (band [1.53, 1.57]), {seconds:.3f} s (< 1 s)")
    assert 1.53 <= z0 <= 1.57
    assert seconds < 1.0


def test_criterion_2_front_velocity_law(tmp_path):
    cfg = tmp_path / "scenario.cfg"
    cfg.write_text(SCENARIO)
    code = main([str(cfg), "-o", str(tmp_path / "out") + "/"])
    cols = _front_csv(tmp_path / "out" / "front.csv")
    t, z0, v0 = cols["t"], cols["z0"], cols["V0"]
    rel = np.abs(v0 - z0 / (2 * np.sqrt(t))) / np.abs(v0)
    ok = code == 0 and list(t) == [0.25, 1.0, 4.0] and np.all(rel <= 1e-12)
    record_criterion(2, "front velocity law", ok,
                     f"max rel deviation {rel.max():.2e} at t={[float(v) for v in t]} (<= 1e-12)")
    assert code == 0
    assert list(t) == [0.25, 1.0, 4.0]
    assert np.all(rel <= 1e-12)


def test_criterion_3_flux_gap_bound():
    p = PhysParams.from_a_squared(1.0, 0.001)
    start = time.perf_counter()
    rng = np.random.default_rng(3)
    n = 100_000
    g = p.a * 10.0 ** rng.uniform(-6, 6, n) * rng.choice([-1.0, 1.0], n)
    gap = flux_gap(g, p)
    bound_ok = bool(np.all(gap < p.lam * p.a * math.pi / 2))
    steep = np.abs(g) >= 1e5 * p.a
    rel = gap[steep] / np.abs(linear_flux(g[steep], p))
    rel_ok = bool(np.all(rel < 1e-5))
    seconds = time.perf_counter() - start
    ok = bound_ok and rel_ok and seconds < 1.0
    record_criterion(3, "flux-gap bound", ok,
                     f"gap < lam*a*pi/2 for all: {bound_ok}; relative gap for "
                     f"|g| >= 1e5 a: max {rel.max():.3e}, {int(np.sum(rel >= 1e-5))} of "
                     f"{rel.size} samples >= 1e-5; {seconds:.3f} s")
    assert bound_ok
    assert rel_ok
    assert seconds < 1.0


def test_criterion_4_pde_similarity_cross_validation(base_run, params):
    start = time.perf_counter()
    prof = integrate_profile(1.0, -1.0, params, z_max=5.0)
    err = cross_validate(base_run.report, prof, 1.0)
    seconds = base_run.seconds + time.perf_counter() - start
    ok = err <= 0.02 and seconds < 60
    record_criterion(4, "PDE-similarity cross-validation", ok,
                     f"sup-norm relative error {err:.4f} (<= 0.02), {seconds:.1f} s")
    assert err <= 0.02
    assert seconds < 60


def test_criterion_5_linear_convergence(params):
    start = time.perf_counter()
    errors = {}
    for n_per_unit in (200, 400):
        grid = Grid1D.uniform(X_MAX, 1 / n_per_unit)
        with pytest.warns(Warning):  # infinite signal speed reaches x_max
            r = solve_linear(Field.zeros(grid), BoundarySpec.sqrt_time(1.0), params,
                             1.0, [1.0])
        sel = grid.x <= 4.0
        exact = linear_oracle(1.0, grid.x[sel], 1.0, params)
        errors[n_per_unit] = np.max(np.abs(r.final.values[sel] - exact)) / 1.0
    seconds = time.perf_counter() - start
    ratio = errors[200] / errors[400]
    ok = 3 <= ratio <= 5 and seconds < 60
    record_criterion(5, "linear baseline convergence", ok,
                     f"errors {errors[200]:.3e} -> {errors[400]:.3e}, ratio "
                     f"{ratio:.3f} (in [3, 5]), {seconds:.1f} s")
    assert 3 <= ratio <= 5
    assert seconds < 60


def test_criterion_6_symmetry_invariance(base_run, params):
    start = time.perf_counter()
    report = base_run.report
    base = symmetry_residual(GroupElement.identity(), report, params)
    elements = {
        "dilatation eps=0.1": GroupElement(eps=0.1),
        "time shift": GroupElement(tau=0.0025),
        "space shift": GroupElement(xi=0.1234),
        "combined": GroupElement(tau=0.0025, xi=0.1234, theta=0.5, eps=0.1),
    }
    ratios = {k: symmetry_residual(g, report, params) / base for k, g in elements.items()}
    theta = symmetry_residual(GroupElement(theta=0.5), report, params)
    seconds = base_run.seconds + time.perf_counter() - start
    ok = all(r <= 3 for r in ratios.values()) and theta == base and seconds < 120
    shown = ", ".join(f"{k}: {v:.3f}" for k, v in ratios.items())
    record_criterion(6, "symmetry invariance", ok,
                     f"ratios to identity {shown} (<= 3); T-shift equal: {theta == base}; "
                     f"{seconds:.1f} s")
    assert all(r <= 3 for r in ratios.values())
    assert theta == base
    assert seconds < 120


def test_criterion_7_gradient_form_consistency(base_run, params):
    grid = Grid1D.uniform(X_MAX, DX)
    h_run = solve_gradient_form(Field.zeros(grid), params, 1.0, [1.0],
                                bc=GradientBC.for_sqrt_time(1.0))
    h_from_T = gradient_of(base_run.report.snapshot_at(1.0)).values
    mismatch = np.max(np.abs(h_run.final.values - h_from_T)) / np.max(np.abs(h_from_T))

    small = Grid1D.uniform(1.0, 0.01)
    x = small.x
    H0 = np.exp(-((x - 0.4) / 0.08) ** 2) - 0.3 * np.exp(-((x - 0.7) / 0.05) ** 2)
    dt = max_stable_dt(small.dx, params)
    cons = solve_gradient_form(Field(small, 0.0, H0), params, 1e4 * dt, [1e4 * dt])
    s0 = math.fsum(H0) * small.dx
    drift = abs(math.fsum(cons.final.values) * small.dx - s0) / abs(s0)
    ok = mismatch <= 0.02 and drift <= 1e-12 and cons.steps_taken == 10_000
    record_criterion(7, "gradient-form consistency", ok,
                     f"sup-norm mismatch {mismatch:.2e} (<= 0.02); sum(H dx) drift "
                     f"{drift:.1e} over {cons.steps_taken} steps (<= 1e-12)")
    assert mismatch <= 0.02
    assert cons.steps_taken == 10_000
    assert drift <= 1e-12


def test_criterion_8_regime_behaviour(params):
    grid = Grid1D.uniform(1.0, 0.01)
    dt = max_stable_dt(grid.dx, params)
    # zero discrete gradient: constant, and alternating samples (nonzero Laplacian)
    still = []
    for values in (np.full(grid.n, 0.3), np.where(np.arange(grid.n) % 2 == 0, 1.0, -0.5)):
        f = Field(grid, 0.0, values)
        out = step_quasilinear(f, dt, BoundarySpec.constant(values[0], values[-1]), params)
        still.append(bool(np.array_equal(out.values, values)))

    # steep gradient ~100 a everywhere, with curvature so the step is not trivial
    g = 100 * params.a
    x = grid.x
    T = g * x + 0.02 * g * np.sin(4 * x) / 4
    f = Field(grid, 0.0, T)
    bc = BoundarySpec.constant(T[0], T[-1])
    dq = step_quasilinear(f, dt, bc, params).values - T
    dl = step_linear(f, dt, bc, params).values - T
    inner = slice(1, -1)
    rel = np.max(np.abs(dq[inner] - dl[inner]) / np.abs(dl[inner]))
    ok = all(still) and rel <= 1e-3
    record_criterion(8, "regime behaviour", ok,
                     f"zero-gradient fields stationary: {still}; steep-gradient update "
                     f"max rel deviation from linear {rel:.2e} (<= 1e-3)")
    assert all(still)
    assert rel <= 1e-3
