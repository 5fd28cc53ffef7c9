"""Acceptance criteria, each run at its stated tolerance and runtime budget.

Every test prints a single PASS/FAIL line; the lines are repeated in the
pytest terminal summary.
"""
import time
from math import pi

import numpy as np

from georiesz.coefficients import coefficient_table, gegenbauer_coefficient
from georiesz.config import (
    CapConfig,
    DecayConfig,
    ExtremizersConfig,
    GapScanConfig,
    StolarskyConfig,
)
from georiesz.experiments import (
    run_cap,
    run_decay,
    run_extremizers,
    run_gap_scan,
    run_stolarsky,
    sign_scan,
)
from georiesz.pointsets import OptimizerOptions, generate, multistart, optimize_energy
from georiesz.potential import PotentialSpec
from georiesz.powerseries import series_coefficients
from georiesz.quadrature import theta_rule
from georiesz.specfun import (
    SphereContext,
    cesaro_kernel,
    connection_reconstruct,
    gegenbauer_eval,
    gegenbauer_normalized,
    normalized_derivative,
)


def _potential(delta, eps):
    return PotentialSpec.logarithmic(eps) if delta == "log" else PotentialSpec.geodesic(delta, eps)


def test_sign_laws(verdict):
    t0 = time.perf_counter()
    cells, bad = 0, []
    for d in (1, 2, 3, 4):
        deltas = [0.25, 0.5, 0.75, -0.5] + ([-1.0] if d >= 2 else []) + ([-2.0] if d >= 3 else []) + ["log"]
        for delta in deltas:
            for eps in (0.0, 0.2):
                _, pred, viol = sign_scan(_potential(delta, eps), SphereContext(d), 64)
                cells += 1
                bad += [(d, delta, eps, n) for n in viol]
    runtime = time.perf_counter() - t0
    ok = not bad and runtime < 120
    verdict("1 sign laws", ok, f"{cells} cells, n <= 64, exceptions={len(bad)}, {runtime:.1f}s")
    assert ok, bad[:10]


def test_dual_oracle(verdict):
    t0 = time.perf_counter()
    grid = [(2, 0.5), (3, 0.25), (4, 0.75), (2, -1.0), (3, -2.0), (2, "log")]
    worst = 0.0
    for d, delta in grid:
        spec = _potential(delta, 0.2)
        quad = coefficient_table(spec, SphereContext(d), 16).values
        series = np.array([c.value for c in series_coefficients(spec, 16, d, K=16384)])
        worst = max(worst, float(np.max(np.abs(series / quad - 1))))
    runtime = time.perf_counter() - t0
    ok = worst <= 1e-7 and runtime < 60
    verdict("2 dual oracle", ok, f"6 cells, eps=0.2, n <= 16, max rel={worst:.2e}, {runtime:.1f}s")
    assert ok


def test_stolarsky(verdict):
    rep = run_stolarsky(StolarskyConfig())
    ok = rep.passed and rep.wall_clock < 120
    verdict("3 stolarsky", ok, f"{rep.fits['cases']} cases, failures={rep.fits['failures']}, {rep.wall_clock:.1f}s")
    assert ok


def test_decay_exponents(verdict):
    t0 = time.perf_counter()
    slopes = {}
    ok = True
    for d, delta in ((2, 0.5), (2, -1.0), (3, 0.5)):
        rep = run_decay(DecayConfig(d=d, delta=delta, n_min=16, n_max=256, slope_tol=0.15))
        slopes[(d, delta)] = round(rep.fits["slope"], 4)
        ok &= rep.passed
    runtime = time.perf_counter() - t0
    ok = ok and runtime < 120
    verdict("4 decay exponents", ok, f"slopes={slopes}, {runtime:.1f}s")
    assert ok


def test_gap_asymptotics(verdict):
    t0 = time.perf_counter()
    neg = run_gap_scan(GapScanConfig(d=2, delta=-1.0, exponent_tol=0.1))
    half = run_gap_scan(GapScanConfig(d=2, delta=0.5, exponent_tol=0.15))
    lg = run_gap_scan(GapScanConfig(d=2, log=True, log_ratio_range=(0.6, 1.7)))
    runtime = time.perf_counter() - t0
    ok = neg.passed and half.passed and lg.passed and runtime < 1800
    verdict(
        "5 gap asymptotics",
        ok,
        f"slope(-1)={neg.fits['slope']:.4f}, slope(0.5)={half.fits['slope']:.4f}, "
        f"log flatness={lg.fits['flatness_ratio']:.3f}, {runtime:.0f}s",
    )
    assert ok


def test_beck_exponent(verdict):
    rep = run_cap(CapConfig())
    f = rep.fits
    ok = rep.passed and rep.wall_clock < 600
    verdict(
        "6 cap discrepancy",
        ok,
        f"slope={f['slope']:.4f}, |mc - spectral|={abs(f['monte_carlo'] - f['spectral']):.2e} "
        f"vs 3 se={3 * f['combined_stderr']:.2e}, {rep.wall_clock:.1f}s",
    )
    assert ok


def test_extremizer_orderings(verdict):
    t0 = time.perf_counter()
    results = {}
    for delta in (0.5, 1.0, 2.0, -1.0):
        rep = run_extremizers(ExtremizersConfig(d=2, delta=delta))
        results[delta] = rep.passed
        if delta == 1.0:
            sym = [c for c in rep.cells if c["measure"] == "symmetric_random"]
            results["pi/2"] = all(abs(c["energy"] - pi / 2) <= 1e-10 for c in sym)
        if delta == 2.0:
            results["two_point"] = abs(rep.cells[1]["energy"] - pi ** 2 / 2) <= 1e-12
    runtime = time.perf_counter() - t0
    ok = all(results.values()) and runtime < 60
    verdict("7 extremizer orderings", ok, f"{results}, {runtime:.1f}s")
    assert ok


def _funk_hecke_error(spec, beta, n_max=12, alpha=0.7):
    ctx = SphereContext(2)
    rule = theta_rule(beta, n_osc=2 * n_max)
    phi = np.linspace(0, 2 * pi, 129)[:-1]
    e = np.array([np.sin(alpha), 0.0, np.cos(alpha)])
    th = rule.nodes[:, None]
    y = np.stack([np.sin(th) * np.cos(phi), np.sin(th) * np.sin(phi), np.cos(th) * np.ones_like(phi)], -1)
    ye = np.clip(y @ e, -1, 1)
    base = spec.theta(rule.nodes) * np.sin(rule.nodes) / 2
    worst = 0.0
    for n in range(n_max + 1):
        lhs = np.dot(rule.weights, base * gegenbauer_normalized(n, ctx, ye).mean(axis=1))
        rhs = gegenbauer_coefficient(spec, n, ctx) * gegenbauer_normalized(n, ctx, np.cos(alpha))
        worst = max(worst, abs(lhs - rhs))
    return worst


def test_special_functions(verdict):
    t0 = time.perf_counter()
    rng = np.random.default_rng(8)
    checks = {}

    err = 0.0
    h = 1e-6
    for _ in range(200):
        n, lam, t = int(rng.integers(1, 41)), float(rng.choice([0.0, 0.5, 1.0, 1.5, 2.0])), rng.uniform(-0.95, 0.95)
        R = (lambda x: np.cos(n * np.arccos(x))) if lam == 0 else (lambda x: gegenbauer_eval(n, lam, x) / gegenbauer_eval(n, lam, 1.0))
        exact = normalized_derivative(n, lam, t)
        err = max(err, abs((R(t + h) - R(t - h)) / (2 * h) - exact) / max(1.0, abs(exact)))
    checks["derivative"] = err <= 1e-6

    th, n, lam, mu = 1.0, 4, 1.0, 1.5
    value, _, _ = connection_reconstruct(n, lam, mu, th, tol=1e-9)
    lhs = np.sin(th) ** (2 * lam) * gegenbauer_eval(n, lam, np.cos(th)) / gegenbauer_eval(n, lam, 1.0)
    checks["connection"] = abs(value - lhs) < 1e-8

    ctx = SphereContext(2)
    grid = np.linspace(0, pi, 20001)
    neg_ok, near_ok, C = True, True, []
    for m in range(1, 65):
        k = cesaro_kernel(m, ctx, np.cos(grid))
        neg_ok &= bool(np.min(k) >= -1e-12)
        k1 = cesaro_kernel(m, ctx, 1.0)
        near = cesaro_kernel(m, ctx, np.cos(np.linspace(0, 1 / (2 * m), 201)))
        near_ok &= bool(np.min(near) >= 0.5 * k1)
        if m in (8, 16, 32, 64):
            C.append(float(np.max(k * (1 + m * grid) ** 3 / m ** 2)))
    checks["cesaro nonnegative"] = neg_ok
    checks["cesaro near pole"] = near_ok
    # one constant must serve every n: the per-n constants may not drift
    checks["cesaro bound shape"] = max(C) / min(C) <= 1.25

    fh = max(
        _funk_hecke_error(PotentialSpec.geodesic(0.5), 1.5),
        _funk_hecke_error(PotentialSpec.geodesic(-1.0), 0.0),
        _funk_hecke_error(PotentialSpec.logarithmic(), 1.0),
    )
    checks["funk-hecke"] = fh < 1e-8
    runtime = time.perf_counter() - t0
    ok = all(checks.values()) and runtime < 120
    verdict(
        "8 special functions",
        ok,
        f"derivative err={err:.1e}, fitted C={max(C):.2f} (spread {max(C) / min(C):.3f}), "
        f"funk-hecke err={fh:.1e}, failed={[k for k, v in checks.items() if not v]}, {runtime:.1f}s",
    )
    assert ok


def test_optimizer_sanity(verdict):
    t0 = time.perf_counter()
    spec = PotentialSpec.geodesic(-1.0)
    opts = OptimizerOptions(max_iterations=2000)
    Z, _ = optimize_energy(generate("random_uniform", 4, SphereContext(1), seed=11), spec, opts)
    ang = np.sort(np.arctan2(Z.points[:, 1], Z.points[:, 0]))
    gap_err = float(np.max(np.abs(np.diff(np.r_[ang, ang[0] + 2 * pi]) - pi / 2)))
    starts = [generate("random_uniform", 6, SphereContext(2), seed=s) for s in range(10)]
    _, rep = multistart(starts, spec, opts)
    oct_err = abs(rep.final_energy - 27 / pi)
    runtime = time.perf_counter() - t0
    ok = gap_err < 1e-6 and oct_err < 1e-6 and runtime < 60
    verdict("9 optimizer sanity", ok, f"circle gap err={gap_err:.1e}, octahedron err={oct_err:.1e}, {runtime:.1f}s")
    assert ok
