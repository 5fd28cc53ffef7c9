"""Energy integrals I_F(mu) for a small family of probability measures on S^d,
the discrete geodesic Riesz energy, and spectral moments b_n of point sets.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import pi

import numpy as np

from .coefficients import CoefficientTable, kappa, spectral_tail_bound
from .errors import CertificationError, DomainError, SingularEnergyError
from .potential import CAP, GEODESIC, SPECTRAL
from .quadrature import integrate_theta_singular
from .specfun import SphereContext, _as_ctx, harmonic_dims, iter_normalized

BLOCK = 512
COINCIDENT = 1.0 - 1e-15


@dataclass(frozen=True)
class PointSet:
    """N unit vectors in R^(d+1), stored as an (N, d+1) array."""

    points: np.ndarray
    d: int = field(default=None)

    def __post_init__(self):
        pts = np.array(self.points, dtype=float, ndmin=2)
        if pts.ndim != 2 or len(pts) < 1:
            raise DomainError("a point set needs at least one point")
        d = pts.shape[1] - 1 if self.d is None else int(self.d)
        if pts.shape[1] != d + 1 or d < 1:
            raise DomainError(f"points of length {pts.shape[1]} do not live on S^{d}")
        dev = np.max(np.abs(np.linalg.norm(pts, axis=1) - 1.0))
        if dev > 1e-12:
            raise DomainError(f"points must have unit norm (max deviation {dev:.3g})")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "d", d)

    @classmethod
    def from_array(cls, x, normalize=True):
        x = np.array(x, dtype=float, ndmin=2)
        if normalize:
            x = x / np.linalg.norm(x, axis=1, keepdims=True)
        return cls(x)

    @property
    def N(self):
        return len(self.points)

    @property
    def ctx(self):
        return SphereContext(self.d)

    def __len__(self):
        return self.N

    def to_text(self):
        return "".join(" ".join(f"{v:.17g}" for v in row) + "\n" for row in self.points)

    def write(self, path):
        with open(path, "w") as fh:
            fh.write(self.to_text())

    @classmethod
    def read(cls, path):
        return cls.from_array(np.loadtxt(path, ndmin=2), normalize=False)

    def min_separation(self):
        if self.N < 2:
            return pi
        best = 1.0 - 2.0
        for i0, G in _gram_blocks(self.points):
            rows = np.arange(i0, i0 + len(G))
            G = G.copy()
            G[np.arange(len(G)), rows] = -2.0
            best = max(best, float(G.max()))
        return float(np.arccos(np.clip(best, -1.0, 1.0)))


def _gram_blocks(Z, block=BLOCK):
    for i0 in range(0, len(Z), block):
        yield i0, np.clip(Z[i0:i0 + block] @ Z.T, -1.0, 1.0)


def block_angles(A, P, G, near=0.99):
    """Angles between the rows of A and P given their Gram block G.

    arccos loses about half the digits when |G| is close to 1, so those entries
    are recomputed as 2 atan2(|x - y|, |x + y|), accurate to rounding everywhere.
    """
    theta = np.arccos(G)
    i, j = np.nonzero(np.abs(G) > near)
    if len(i):
        x, y = A[i], P[j]
        theta[i, j] = 2.0 * np.arctan2(np.linalg.norm(x - y, axis=1), np.linalg.norm(x + y, axis=1))
    return theta


def _map(fn, items, workers):
    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


# ---------------------------------------------------------------------------
# continuous energies


def uniform_energy(ctx, spec, tol=1e-13):
    """I_F(sigma) = kappa * int_0^pi F(cos th) sin^(d-1) th dth."""
    ctx = _as_ctx(ctx)
    if spec.kind == SPECTRAL:
        return spec.offset + spec.sign * (spec.table[0] if spec.table else 0.0)
    if spec.kind == CAP:
        from .coefficients import cap_indicator_coefficient
        return cap_indicator_coefficient(spec.cap_height, 0, ctx)
    if spec.kind == GEODESIC and spec.epsilon == 0.0 and spec.delta <= -ctx.d:
        raise DomainError(f"I(sigma) diverges for delta={spec.delta} <= -d")
    lam = ctx.lam
    g = lambda th: spec.theta(th) * np.sin(th) ** (2 * lam)
    return kappa(lam) * integrate_theta_singular(g, spec.singular_exponent, ctx, tol=tol)


@dataclass(frozen=True)
class MeasureSpec:
    """uniform, discrete (a PointSet), two_point (+-pole) or
    perturbed_harmonic (1 + amplitude * Y_n) d sigma with ||Y_n||_2 = 1."""

    kind: str
    points: PointSet = None
    degree: int = 0
    amplitude: float = 0.0

    KINDS = ("uniform", "discrete", "two_point", "perturbed_harmonic")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise DomainError(f"unknown measure kind {self.kind!r}")
        if self.kind == "discrete" and self.points is None:
            raise DomainError("discrete measure needs a point set")
        if self.kind == "perturbed_harmonic" and self.degree < 1:
            raise DomainError("perturbation degree must be >= 1")

    @classmethod
    def uniform(cls):
        return cls("uniform")

    @classmethod
    def discrete(cls, Z):
        return cls("discrete", points=Z)

    @classmethod
    def two_point(cls):
        return cls("two_point")

    @classmethod
    def perturbed_harmonic(cls, n, amplitude):
        return cls("perturbed_harmonic", degree=int(n), amplitude=float(amplitude))


def measure_energy(mu, F, ctx):
    """I_F(mu) for a PotentialSpec or a CoefficientTable ``F``.

    With a table the spectral form Fhat(0) + sum_n Fhat(n) b_n(mu) is used and
    a CertificationError is raised when the table's tail bound is infinite.
    Discrete measures include the diagonal i = j, so potentials infinite at
    t = 1 are refused (use discrete_energy).
    """
    ctx = _as_ctx(ctx)
    if isinstance(F, CoefficientTable):
        return _measure_energy_table(mu, F, ctx)
    spec = F
    if mu.kind == "uniform":
        return uniform_energy(ctx, spec)
    if mu.kind == "perturbed_harmonic":
        from .coefficients import gegenbauer_coefficient
        return uniform_energy(ctx, spec) + mu.amplitude ** 2 * gegenbauer_coefficient(spec, mu.degree, ctx)
    if mu.kind == "two_point":
        if not spec.finite_at_one:
            raise SingularEnergyError("two-point measure has infinite energy for a potential singular at t = 1")
        return 0.5 * float(spec.value_t(1.0, ctx) + spec.value_t(-1.0, ctx))
    Z = mu.points
    if not spec.finite_at_one:
        raise SingularEnergyError("diagonal terms are infinite; use discrete_energy for the pair sum")
    return _pair_sum(Z, spec, ctx, diagonal=True) / Z.N ** 2


def _measure_energy_table(mu, table, ctx):
    c = table.values
    if mu.kind == "uniform":
        return float(c[0])
    if mu.kind == "perturbed_harmonic":
        n = mu.degree
        if n > table.K:
            raise CertificationError(f"degree {n} beyond table length {table.K}")
        return float(c[0] + mu.amplitude ** 2 * c[n])
    tail = spectral_tail_bound(table)
    if not np.isfinite(tail):
        raise CertificationError("coefficient table has no finite tail bound")
    if mu.kind == "two_point":
        b = harmonic_dims(table.K, ctx) * (np.arange(table.K + 1) % 2 == 0)
    else:
        b = spectral_moments(mu.points, table.K, ctx)
    return float(c[0] + np.dot(c[1:], b[1:]))


# ---------------------------------------------------------------------------
# discrete energies


def _pair_sum(Z, spec, ctx, diagonal=False, workers=None):
    P = Z.points
    singular = not spec.finite_at_one
    spectral = spec.kind == SPECTRAL

    def block(i0):
        G = np.clip(P[i0:i0 + BLOCK] @ P.T, -1.0, 1.0)
        rows = np.arange(len(G))[:, None]
        cols = np.arange(P.shape[0])[None, :]
        keep = cols > rows + i0
        if singular:
            bad = np.argwhere(keep & (G > COINCIDENT))
            if len(bad):
                i, j = bad[0]
                raise SingularEnergyError(
                    f"points {i0 + i} and {j} coincide (inner product {G[i, j]:.17g})", pair=(int(i0 + i), int(j))
                )
        if spectral:
            vals = spec.value_t(G[keep], ctx)
        else:
            with np.errstate(divide="ignore"):
                vals = spec.theta(block_angles(P[i0:i0 + BLOCK], P, G)[keep])
        s = 2.0 * float(np.sum(vals))
        if diagonal:
            s += float(np.sum(spec.value_t(np.ones(len(G)), ctx)))
        return s

    parts = _map(block, range(0, Z.N, BLOCK), workers)
    return float(np.sum(parts))


def discrete_energy(Z, spec, workers=None):
    """E(Z) = sum_{i<j} F(z_i . z_j), e.g. sum of rho(z_i, z_j)^delta.

    Blocks are fixed-size row slabs reduced in a fixed order, so the result
    does not depend on ``workers``.
    """
    if Z.N < 2:
        return 0.0
    return 0.5 * _pair_sum(Z, spec, Z.ctx, diagonal=False, workers=workers)


def normalized_discrete_energy(Z, spec, workers=None):
    """2 E(Z) / N^2, the quantity compared with I(sigma) in the gap experiments."""
    return 2.0 * discrete_energy(Z, spec, workers=workers) / Z.N ** 2


def spectral_moments(Z, K, ctx=None, workers=None):
    """b_n = N^-2 sum_{i,j} zonal_n(z_i . z_j) for n = 0..K."""
    ctx = Z.ctx if ctx is None else _as_ctx(ctx)
    P = Z.points
    lam = ctx.lam

    def block(i0):
        G = np.clip(P[i0:i0 + BLOCK] @ P.T, -1.0, 1.0)
        return np.array([float(np.sum(r)) for r in iter_normalized(K, lam, G)])

    parts = _map(block, range(0, Z.N, BLOCK), workers)
    sums = np.sum(np.array(parts), axis=0)
    return harmonic_dims(K, ctx) * sums / Z.N ** 2


def spectral_moment(Z, n, ctx=None):
    if n < 1:
        raise DomainError("spectral moments are defined for n >= 1")
    return float(spectral_moments(Z, n, ctx)[n])
