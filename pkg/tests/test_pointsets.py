import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from georiesz.energy import PointSet, discrete_energy
from georiesz.errors import DomainError
from georiesz.pointsets import (
    GENERATORS,
    OptimizerOptions,
    energy_and_gradient,
    equal_area_partition,
    generate,
    geodesic_distance,
    multistart,
    optimize_energy,
)
from georiesz.potential import PotentialSpec
from georiesz.specfun import SphereContext

OCTAHEDRON_NEG1 = 12 / (np.pi / 2) + 3 / np.pi  # 27 / pi


def test_geodesic_distance_examples():
    p = np.array([0.0, 0.6, 0.8])
    assert geodesic_distance(p, p) == 0.0
    assert geodesic_distance(p, -p) == pytest.approx(np.pi, abs=1e-15)
    Z = generate("random_uniform", 200, SphereContext(2), seed=5).points
    x, y = Z[:100], Z[100:]
    assert np.max(np.abs(geodesic_distance(x, y) + geodesic_distance(x, -y) - np.pi)) < 1e-12


def test_generate_examples():
    C = generate("equal_spaced_circle", 4, SphereContext(1))
    ang = np.sort(np.arctan2(C.points[:, 1], C.points[:, 0]))
    assert np.allclose(np.diff(np.r_[ang, ang[0] + 2 * np.pi]), np.pi / 2, atol=1e-15)
    F = generate("fibonacci", 1000, SphereContext(2))
    assert F.min_separation() >= 0.7 * 1000 ** -0.5
    with pytest.raises(DomainError):
        generate("fibonacci", 10, SphereContext(3))
    with pytest.raises(DomainError):
        generate("symmetric_random", 7, SphereContext(2))
    with pytest.raises(DomainError):
        generate("nope", 7, SphereContext(2))


@settings(max_examples=40, deadline=None)
@given(kind=st.sampled_from(GENERATORS), N=st.integers(1, 300), d=st.integers(1, 4), seed=st.integers(0, 2 ** 63))
def test_generators_unit_norm_and_deterministic(kind, N, d, seed):
    ctx = SphereContext(d)
    try:
        Z = generate(kind, N, ctx, seed)
    except DomainError:
        return
    assert Z.N == N and Z.d == d
    assert np.max(np.abs(np.linalg.norm(Z.points, axis=1) - 1)) <= 1e-12
    assert np.array_equal(Z.points, generate(kind, N, ctx, seed).points)


def test_partition_circle():
    P = equal_area_partition(8, SphereContext(1))
    assert np.allclose(P.areas, 1 / 8)
    assert np.allclose(P.diameters, 2 * np.pi / 8)


@settings(max_examples=40, deadline=None)
@given(N=st.integers(1, 3000))
def test_partition_areas_exact(N):
    P = equal_area_partition(N, SphereContext(2))
    assert len(P.areas) == N == len(P.centers)
    assert abs(np.sum(P.areas) - 1.0) < 1e-12
    assert np.max(np.abs(P.areas - 1.0 / N)) < 1e-12
    assert P.max_diameter <= 6.0 * N ** -0.5 or N < 10


def test_partition_diameter_regression_bound():
    # any region of measure 1/100 has geodesic diameter at least that of the
    # cap with the same measure, 2 arccos(0.98) = 0.4007 > 0.4; kept as stated
    P = equal_area_partition(100, SphereContext(2))
    assert P.max_diameter <= 4 * 100 ** -0.5


def test_partition_diameter_bound_is_an_upper_bound():
    # brute-force diameters of every cell from boundary samples
    P = equal_area_partition(60, SphereContext(2))
    m = 0
    for lo, hi, c in P.bands:
        th = np.linspace(lo, hi, 60)
        ph = np.linspace(0, 2 * np.pi / c, 60)
        T, F = np.meshgrid(th, ph)
        x = np.column_stack([(np.sin(T) * np.cos(F)).ravel(), (np.sin(T) * np.sin(F)).ravel(), np.cos(T).ravel()])
        brute = np.arccos(np.clip(np.min(x @ x.T), -1, 1))
        assert brute <= P.diameters[m] + 1e-12
        m += c


def test_options_validation():
    with pytest.raises(DomainError):
        OptimizerOptions(eta=0.0)
    with pytest.raises(DomainError):
        OptimizerOptions(step=-1.0)
    with pytest.raises(DomainError):
        optimize_energy(generate("random_uniform", 4, SphereContext(2)), PotentialSpec.geodesic(1.5))


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(0)
    X = generate("random_uniform", 12, SphereContext(2), seed=4).points.copy()
    spec = PotentialSpec.geodesic(-1.0)
    E, G, _, _ = energy_and_gradient(X, spec)
    V = rng.standard_normal(X.shape)
    V -= np.sum(V * X, axis=1, keepdims=True) * X
    h = 1e-6
    Ep = energy_and_gradient((X + h * V) / np.linalg.norm(X + h * V, axis=1, keepdims=True), spec)[0]
    Em = energy_and_gradient((X - h * V) / np.linalg.norm(X - h * V, axis=1, keepdims=True), spec)[0]
    assert (Ep - Em) / (2 * h) == pytest.approx(np.sum(G * V), rel=1e-6)


def test_two_points_ascend_to_antipodal():
    Z0 = PointSet.from_array([[1.0, 0.2, 0.1], [0.3, 1.0, -0.4]])
    Z, rep = optimize_energy(Z0, PotentialSpec.geodesic(0.5), OptimizerOptions(max_iterations=500))
    assert discrete_energy(Z, PotentialSpec.geodesic(1.0)) == pytest.approx(np.pi, abs=1e-6)
    assert rep.direction == "ascent"
    assert all(b >= a - 1e-15 for a, b in zip(rep.energies, rep.energies[1:]))


def test_circle_four_points_equal_spacing():
    Z0 = generate("random_uniform", 4, SphereContext(1), seed=11)
    Z, rep = optimize_energy(Z0, PotentialSpec.geodesic(-1.0), OptimizerOptions(max_iterations=2000))
    ang = np.sort(np.arctan2(Z.points[:, 1], Z.points[:, 0]))
    gaps = np.diff(np.r_[ang, ang[0] + 2 * np.pi])
    assert np.max(np.abs(gaps - np.pi / 2)) < 1e-6
    assert all(b <= a + 1e-15 for a, b in zip(rep.energies, rep.energies[1:]))


def test_octahedron_from_multistart():
    ctx = SphereContext(2)
    starts = [generate("random_uniform", 6, ctx, seed=s) for s in range(10)]
    Z, rep = multistart(starts, PotentialSpec.geodesic(-1.0), OptimizerOptions(max_iterations=2000))
    assert rep.final_energy == pytest.approx(OCTAHEDRON_NEG1, abs=1e-6)
