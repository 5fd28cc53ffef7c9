"""Point-set generators, an equal-area partition of S^1 and S^2, and projected
gradient optimization of the discrete geodesic energy on (S^d)^N.
"""
from dataclasses import dataclass, field
from math import pi

import numpy as np

from .energy import BLOCK, PointSet, block_angles
from .errors import DomainError, SingularEnergyError
from .potential import GEODESIC, LOGARITHMIC
from .specfun import _as_ctx

GOLDEN = (1.0 + 5.0 ** 0.5) / 2.0
GENERATORS = ("random_uniform", "fibonacci", "equal_spaced_circle", "equal_area_centers", "symmetric_random")


def geodesic_distance(x, y):
    """rho(x, y) = arccos(x . y), evaluated as 2 atan2(|x - y|, |x + y|) so that
    nearly equal and nearly antipodal pairs keep full relative accuracy."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape[-1] != y.shape[-1]:
        raise DomainError(f"dimension mismatch: {x.shape[-1]} vs {y.shape[-1]}")
    rho = 2.0 * np.arctan2(np.linalg.norm(x - y, axis=-1), np.linalg.norm(x + y, axis=-1))
    return rho if np.ndim(rho) else float(rho)


def random_uniform(N, d, rng):
    x = rng.standard_normal((N, d + 1))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def fibonacci_sphere(N):
    """Golden-angle spiral on S^2 with equal-area latitudes z_i = 1 - (2i + 1)/N."""
    i = np.arange(N) + 0.5
    z = 1.0 - 2.0 * i / N
    phi = 2.0 * pi * i / GOLDEN
    r = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def circle_points(angles):
    return np.column_stack([np.cos(angles), np.sin(angles)])


def generate(kind, N, ctx, seed=0):
    """Deterministic point set of the given kind for (N, seed)."""
    ctx = _as_ctx(ctx)
    if N < 1:
        raise DomainError("N must be >= 1")
    rng = np.random.default_rng(seed)
    d = ctx.d
    if kind == "random_uniform":
        x = random_uniform(N, d, rng)
    elif kind == "fibonacci":
        if d != 2:
            raise DomainError("fibonacci points need d = 2")
        x = fibonacci_sphere(N)
    elif kind == "equal_spaced_circle":
        if d != 1:
            raise DomainError("equal_spaced_circle needs d = 1")
        x = circle_points(2 * pi * np.arange(N) / N)
    elif kind == "equal_area_centers":
        x = equal_area_partition(N, ctx).centers
    elif kind == "symmetric_random":
        if N % 2:
            raise DomainError("symmetric_random needs even N")
        h = random_uniform(N // 2, d, rng)
        x = np.concatenate([h, -h])
    else:
        raise DomainError(f"unknown generator {kind!r}")
    return PointSet(x / np.linalg.norm(x, axis=1, keepdims=True))


# ---------------------------------------------------------------------------
# equal-area partition


@dataclass(frozen=True)
class EqualAreaPartition:
    """Cells of measure 1/N; ``bands`` holds (theta_lo, theta_hi, cells) for S^2."""

    d: int
    N: int
    centers: np.ndarray
    areas: np.ndarray
    diameters: np.ndarray
    bands: tuple = field(default=())

    @property
    def max_diameter(self):
        return float(np.max(self.diameters))

    @property
    def diameter_constant(self):
        """max diameter * N^(1/d)."""
        return self.max_diameter * self.N ** (1.0 / self.d)


def _band_counts(N):
    # polar caps of one cell each, collars of roughly square cells in between
    if N <= 2:
        return [N] if N == 1 else [1, 1]
    theta_c = 2.0 * np.arcsin(np.sqrt(1.0 / N))
    ideal = np.sqrt(4.0 * pi / N)
    n_collars = max(1, int(round((pi - 2 * theta_c) / ideal)))
    width = (pi - 2 * theta_c) / n_collars
    counts, carry = [1], 0.0
    for k in range(n_collars):
        lo = theta_c + k * width
        hi = lo + width
        exact = (np.cos(lo) - np.cos(hi)) / 2.0 * N + carry
        m = max(1, int(round(exact)))
        carry = exact - m
        counts.append(m)
    counts[-1] += (N - 2) - sum(counts[1:])
    counts.append(1)
    return counts


def _cell_diameter(t_lo, t_hi, dphi, grid=401):
    """Certified upper bound on the geodesic diameter of a latitude-longitude cell.

    For fixed colatitudes the distance grows with the longitude gap, so the
    extreme pairs sit min(dphi, pi) apart: cos rho >= cos t1 cos t2 + cos(dphi) sin t1 sin t2.
    That bilinear form is minimized on a grid; its gradient is bounded by 2, so
    subtracting 2h (h the grid step) keeps the result an upper bound on rho.
    """
    if dphi >= 2 * pi - 1e-12:
        # polar cap (or the whole sphere)
        r = t_hi if t_lo == 0.0 else pi - t_lo
        return min(pi, 2.0 * r)
    c = np.cos(min(dphi, pi))
    th = np.linspace(t_lo, t_hi, grid)
    h = (t_hi - t_lo) / (grid - 1)
    ct, st = np.cos(th), np.sin(th)
    f = np.min(np.outer(ct, ct) + c * np.outer(st, st))
    return float(np.arccos(max(-1.0, f - 2.0 * h)))


def equal_area_partition(N, ctx):
    """Zonal-band partition: cumulative cell counts fix the band edges through
    z = 1 - 2 m / N, so every cell has measure exactly 1/N."""
    ctx = _as_ctx(ctx)
    if N < 1:
        raise DomainError("N must be >= 1")
    if ctx.d == 1:
        ang = 2 * pi * (np.arange(N) + 0.5) / N
        return EqualAreaPartition(1, N, circle_points(ang), np.full(N, 1.0 / N), np.full(N, 2 * pi / N))
    if ctx.d != 2:
        raise DomainError("equal-area partitions are implemented for d in {1, 2}")
    counts = _band_counts(N)
    centers, areas, diams, bands = [], [], [], []
    m = 0
    for b, c in enumerate(counts):
        z_hi, z_lo = 1.0 - 2.0 * m / N, 1.0 - 2.0 * (m + c) / N
        t_lo, t_hi = np.arccos(np.clip([z_hi, z_lo], -1, 1))
        if m == 0:
            t_lo = 0.0
        if m + c == N:
            t_hi = pi
        dphi = 2 * pi / c
        z_mid = 0.5 * (z_hi + z_lo) if c > 1 else (1.0 if m == 0 else -1.0) if N > 1 else 1.0
        r = np.sqrt(max(0.0, 1.0 - z_mid ** 2))
        phi = dphi * (np.arange(c) + 0.5) + 0.5 * dphi * (b % 2)
        centers.append(np.column_stack([r * np.cos(phi), r * np.sin(phi), np.full(c, z_mid)]))
        areas.append(np.full(c, ((z_hi - z_lo) / 2.0) / c))
        diams.append(np.full(c, _cell_diameter(t_lo, t_hi, dphi)))
        bands.append((float(t_lo), float(t_hi), c))
        m += c
    return EqualAreaPartition(
        2, N, np.concatenate(centers), np.concatenate(areas), np.concatenate(diams), tuple(bands)
    )


# ---------------------------------------------------------------------------
# optimization


@dataclass(frozen=True)
class OptimizerOptions:
    max_iterations: int = 200
    step: float = 0.05
    backtrack: float = 0.5
    armijo: float = 1e-4
    grad_tol: float = 1e-10
    eta: float = 1e-12
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.eta <= 1e-6:
            raise DomainError(f"clamp margin must lie in (0, 1e-6], got {self.eta}")
        if not 0 < self.backtrack < 1 or not 0 < self.armijo < 1:
            raise DomainError("backtracking factor and Armijo constant must lie in (0, 1)")
        if self.max_iterations < 0 or self.step <= 0 or self.grad_tol <= 0:
            raise DomainError("iteration cap, step and tolerance must be positive")


@dataclass
class OptimizerReport:
    iterations: int
    energies: list
    grad_norms: list
    converged: bool
    direction: str

    @property
    def final_energy(self):
        return self.energies[-1]

    def to_dict(self):
        return {
            "iterations": self.iterations,
            "energies": [float(e) for e in self.energies],
            "grad_norms": [float(g) for g in self.grad_norms],
            "converged": self.converged,
            "direction": self.direction,
        }


def _check_optimizable(spec, d):
    if spec.kind not in (GEODESIC, LOGARITHMIC):
        raise DomainError("optimization needs a geodesic power or logarithmic potential")
    # the pair sum is finite for any delta once points are distinct; only the
    # continuous comparison needs delta > -d
    if spec.kind == GEODESIC and not spec.delta < 1:
        raise DomainError(f"delta must be < 1 for optimization, got {spec.delta}")


def direction_sign(spec):
    """+1 when the energy is minimized, -1 when maximized (delta in (0, 1))."""
    return -1.0 if spec.kind == GEODESIC and spec.delta * spec.sign > 0 else 1.0


KINK = 1e-3


def energy_and_gradient(X, spec, eta=1e-12, kink=KINK):
    """E = sum_{i<j} F(rho_ij), its Riemannian gradient, a second gradient that
    leaves out pairs within ``kink`` of antipodal, and the minimal separation.

    rho(x, y) is not differentiable at y = -x, and the direction of its
    gradient flips across that point; near-antipodal pairs therefore
    contribute a large, sign-unstable term that stalls line searches at
    configurations containing antipodal pairs.  The optimizer tries the
    second direction first.
    """
    N = len(X)
    E = 0.0
    t_max = -1.0
    G = np.empty_like(X)
    Gs = np.empty_like(X)
    t_kink = -np.cos(kink)
    singular = not spec.finite_at_one
    for i0 in range(0, N, BLOCK):
        T = X[i0:i0 + BLOCK] @ X.T
        idx = np.arange(i0, min(i0 + BLOCK, N))
        T[idx - i0, idx] = -1.0
        t_max = max(t_max, float(T.max()))
        T[idx - i0, idx] = 0.0
        if singular and np.any(T > 1.0 - eta):
            i, j = np.argwhere(T > 1.0 - eta)[0]
            raise SingularEnergyError(f"points {i0 + i} and {j} closer than the clamp margin", pair=(int(i0 + i), int(j)))
        np.clip(T, -1.0, 1.0, out=T)
        with np.errstate(divide="ignore"):
            P = spec.theta(block_angles(X[i0:i0 + BLOCK], X, T))
        P[idx - i0, idx] = 0.0
        E += float(np.sum(P))
        # the gradient factor (1 - t^2)^(-1/2) needs the clamp margin
        np.clip(T, -1.0 + eta, 1.0 - eta, out=T)
        rho = np.arccos(T)
        W = spec.derivative_theta(rho) / np.sqrt(1.0 - T * T)
        W[idx - i0, idx] = 0.0
        G[i0:i0 + BLOCK] = -(W @ X)
        near = T < t_kink
        if np.any(near):
            W[near] = 0.0
            Gs[i0:i0 + BLOCK] = -(W @ X)
        else:
            Gs[i0:i0 + BLOCK] = G[i0:i0 + BLOCK]
    G -= np.sum(G * X, axis=1, keepdims=True) * X
    Gs -= np.sum(Gs * X, axis=1, keepdims=True) * X
    if not np.all(np.isfinite(G)):
        raise SingularEnergyError("non-finite gradient")
    return 0.5 * E, G, Gs, float(np.arccos(min(t_max, 1.0)))


def _line_search(X, D, f, sgn, spec, alpha, opts):
    g2 = float(np.sum(D * D))
    for _ in range(60):
        Y = X - alpha * D
        Y /= np.linalg.norm(Y, axis=1, keepdims=True)
        try:
            out = energy_and_gradient(Y, spec, opts.eta)
        except SingularEnergyError:
            alpha *= opts.backtrack
            continue
        if sgn * out[0] <= f - opts.armijo * alpha * g2:
            return Y, out, alpha
        alpha *= opts.backtrack
    return None


def optimize_energy(Z0, spec, opts=None):
    """Projected gradient descent (ascent for delta in (0, 1)) with Armijo
    backtracking and retraction by normalization.  Returns (PointSet, report);
    only improving steps are accepted, so the final energy is never worse than
    the initial one."""
    opts = opts or OptimizerOptions()
    _check_optimizable(spec, Z0.d)
    sgn = direction_sign(spec)
    X = np.array(Z0.points)
    N = len(X)
    E, G, Gs, sep = energy_and_gradient(X, spec, opts.eta)
    energies, norms = [E], [float(np.linalg.norm(Gs))]
    move = opts.step * N ** (-1.0 / Z0.d)
    alpha = move / max(float(np.max(np.linalg.norm(G, axis=1))), 1e-300)
    converged = False
    it = 0
    while it < opts.max_iterations:
        f = sgn * E
        small = norms[-1] <= opts.grad_tol * max(1.0, abs(f))
        dirs = [G] if small or np.array_equal(G, Gs) else [Gs, G]
        step = None
        for D in dirs:
            D = sgn * D
            dmax = float(np.max(np.linalg.norm(D, axis=1)))
            if dmax == 0.0:
                continue
            # no point moves more than half the current minimal separation
            a0 = min(alpha, 0.5 * max(sep, move) / dmax)
            step = _line_search(X, D, f, sgn, spec, a0, opts)
            if step is not None:
                break
        if step is None:
            converged = True
            break
        X, (E, G, Gs, sep), alpha = step[0], step[1], step[2] / opts.backtrack
        it += 1
        energies.append(E)
        norms.append(float(np.linalg.norm(Gs)))
    report = OptimizerReport(it, energies, norms, converged, "descent" if sgn > 0 else "ascent")
    return PointSet(X), report


def multistart(starts, spec, opts=None):
    """Run optimize_energy from each start; return the best (PointSet, report)."""
    sgn = direction_sign(spec)
    best = None
    for Z in starts:
        Z1, rep = optimize_energy(Z, spec, opts)
        if best is None or sgn * rep.final_energy < sgn * best[1].final_energy:
            best = (Z1, rep)
    return best
