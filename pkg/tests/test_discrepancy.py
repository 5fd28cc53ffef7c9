import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import dblquad

from georiesz.coefficients import coefficient_table
from georiesz.discrepancy import (
    cap_discrepancy,
    cap_measure,
    cesaro_deviation,
    check_positive_definite,
    discrepancy_bounds_check,
    l2_discrepancy_spectral,
    mean_abs_coordinate,
    mean_chordal_distance,
    stolarsky_check,
)
from georiesz.energy import MeasureSpec, PointSet, measure_energy, uniform_energy
from georiesz.errors import CertificationError, NotPositiveDefiniteError
from georiesz.pointsets import generate
from georiesz.potential import PotentialSpec
from georiesz.specfun import SphereContext

S2 = SphereContext(2)
POLE = PointSet(np.array([[0.0, 0.0, 1.0]]))
PAIR = PointSet(np.array([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]]))


def test_single_point_spectral_discrepancy():
    coeffs = [0.7, 0.5, 0.25, 0.125]
    spec = PotentialSpec.spectral(coeffs)
    table = coefficient_table(spec, S2, 3)
    value, tail = l2_discrepancy_spectral(POLE, table)
    assert value == pytest.approx(spec.value_t(1.0, S2) - coeffs[0], rel=1e-14)
    assert tail == 0.0


def test_antipodal_pair_degree_one():
    table = coefficient_table(PotentialSpec.spectral([0.0, 1.0]), S2, 1)
    assert abs(l2_discrepancy_spectral(PAIR, table)[0]) < 1e-15


def test_negative_table_rejected():
    table = coefficient_table(PotentialSpec.geodesic(0.5), S2, 8)
    with pytest.raises(NotPositiveDefiniteError):
        check_positive_definite(table)


def test_stolarsky_random_d2():
    Z = generate("random_uniform", 64, S2, seed=2)
    r = stolarsky_check(Z, PotentialSpec.centered_geodesic(0.5), S2, 2048)
    assert r.passed
    assert r.residual <= r.truncation_bound


def test_stolarsky_reference_k4096():
    Z = generate("random_uniform", 32, S2, seed=9)
    r = stolarsky_check(Z, PotentialSpec.centered_geodesic(0.5), S2, 4096)
    assert r.residual < r.truncation_bound


def test_stolarsky_equal_spaced_circle():
    ctx = SphereContext(1)
    Z = generate("equal_spaced_circle", 16, ctx)
    r = stolarsky_check(Z, PotentialSpec.centered_geodesic(1.0), ctx, 4096)
    assert r.residual < 1e-8


@settings(max_examples=15, deadline=None)
@given(N=st.integers(1, 40), d=st.integers(1, 4), seed=st.integers(0, 2 ** 32 - 1),
       coeffs=st.lists(st.floats(0, 2), min_size=2, max_size=9))
def test_stolarsky_exact_for_finite_tables(N, d, seed, coeffs):
    ctx = SphereContext(d)
    Z = generate("random_uniform", N, ctx, seed)
    r = stolarsky_check(Z, PotentialSpec.spectral(coeffs), ctx, len(coeffs) - 1)
    assert r.residual < 1e-10
    assert r.d_squared >= 0


def test_cap_measure_values():
    assert cap_measure(1.0, S2) == 0.0
    assert cap_measure(-1.0, S2) == 1.0
    assert cap_measure(0.0, S2) == pytest.approx(0.5)
    assert cap_measure(0.5, S2) == pytest.approx(0.25)


def test_euclidean_constants():
    assert mean_abs_coordinate(2) == pytest.approx(0.5, rel=1e-14)
    assert mean_chordal_distance(S2) == pytest.approx(4 / 3, rel=1e-13)


def single_point_cap_oracle():
    # N = 1 on S^2 with the point at the pole: x has height s (dsigma = ds / 2) and
    # the cap of height t holds the point iff s >= t; split at s = t so that
    # both pieces are smooth for dblquad
    p = lambda t: (1 - t) / 2
    below, _ = dblquad(lambda s, t: p(t) ** 2 / 2, -1, 1, lambda t: -1, lambda t: t, epsabs=1e-13)
    above, _ = dblquad(lambda s, t: (1 - p(t)) ** 2 / 2, -1, 1, lambda t: t, lambda t: 1, epsabs=1e-13)
    return below + above


def test_single_point_methods_agree():
    oracle = single_point_cap_oracle()
    assert oracle == pytest.approx(1 / 3, rel=1e-12)
    for method in ("spectral", "euclidean_oracle"):
        assert cap_discrepancy(POLE, S2, method).value == pytest.approx(oracle, rel=1e-3)
    mc = cap_discrepancy(POLE, S2, "monte_carlo", budget=400_000, seed=1)
    assert abs(mc.value - oracle) < 4 * mc.stderr


def test_random_large_set_methods_agree():
    Z = generate("random_uniform", 8192, S2, seed=3)
    mc = cap_discrepancy(Z, S2, "monte_carlo", budget=400_000, seed=4)
    sp = cap_discrepancy(Z, S2, "spectral", budget=32)
    assert abs(mc.value - sp.value) <= 3 * np.hypot(mc.stderr, sp.stderr)
    # O(1 / N) for random points
    assert sp.value < 1.0 / Z.N


def test_monte_carlo_budget_certification():
    Z = generate("random_uniform", 64, S2, seed=3)
    with pytest.raises(CertificationError):
        cap_discrepancy(Z, S2, "monte_carlo", budget=1000, target_stderr=1e-9)


def test_bounds_check_brackets_optimized_energy_discrepancy():
    N = 256
    spec = PotentialSpec.centered_geodesic(0.5)
    table = coefficient_table(spec, S2, 2048)
    Z = generate("fibonacci", N, S2)
    d2 = stolarsky_check(Z, spec, S2, 2048).d_squared
    out = discrepancy_bounds_check(S2, table, N, measured=d2)
    assert out["passed"]
    assert out["lower"] == pytest.approx(min(table.values[1:17]))


def test_bounds_check_rates_match():
    spec = PotentialSpec.centered_geodesic(0.5)
    table = coefficient_table(spec, S2, 512)
    Ns = np.array([64, 256, 1024, 4096])
    low = [discrepancy_bounds_check(S2, table, int(n))["lower"] for n in Ns]
    up = [discrepancy_bounds_check(S2, table, int(n))["upper"] for n in Ns]
    assert abs(np.polyfit(np.log(Ns), np.log(low), 1)[0] + 1.25) < 0.1
    assert abs(np.polyfit(np.log(Ns), np.log(up), 1)[0] + 1.25) < 0.1


def test_circle_equal_spacing_beats_random():
    ctx = SphereContext(1)
    spec = PotentialSpec.centered_geodesic(1.0)
    N = 1024
    # D^2 = N^-2 sum F - I(sigma) by the invariance principle
    d2 = lambda Z: measure_energy(MeasureSpec.discrete(Z), spec, ctx) - uniform_energy(ctx, spec)
    eq = d2(generate("equal_spaced_circle", N, ctx))
    rnd = d2(generate("random_uniform", N, ctx, seed=1))
    # random: O(1/N); equal spacing: O(N^-(1 + delta/d)) = O(N^-2)
    assert rnd / eq > 0.1 * N


def test_cesaro_deviation_routes_agree():
    Z = generate("fibonacci", 16, S2)
    n1, spectral, premise = cesaro_deviation(Z, a=8.0, method="spectral")
    n2, product, _ = cesaro_deviation(Z, a=8.0, method="product")
    assert n1 == n2 == 32
    assert spectral == pytest.approx(product, rel=1e-10)
    assert premise > 2 and spectral > 1.0
