"""Stolarsky-type identities, spectral L2 discrepancies and spherical-cap
discrepancy estimators.

For a positive definite F with Gegenbauer coefficients Fhat(k) >= 0 (k >= 1)

    N^-2 sum_{i,j} F(z_i . z_j) = D^2(Z) + I_F(sigma),   D^2(Z) = sum_{k>=1} Fhat(k) b_k(Z).
"""
from dataclasses import asdict, dataclass
from math import ceil, pi

import numpy as np
from scipy.special import betainc, gammaln

from .coefficients import cap_l2_weights, coefficient_table, kappa, spectral_tail_bound
from .energy import MeasureSpec, measure_energy, spectral_moments, uniform_energy
from .errors import CertificationError, DomainError, NotPositiveDefiniteError
from .quadrature import integrate_theta_singular
from .specfun import _as_ctx, cesaro_weights, harmonic_dims, iter_normalized


def check_positive_definite(table, rel=1e-12):
    """Raise unless Fhat(k) >= -(10 tol_k + rel * max|Fhat|) for every k >= 1."""
    v = np.asarray(table.values)
    slack = rel * np.max(np.abs(v))
    if table.tol is not None:
        slack = slack + 10.0 * np.asarray(table.tol)
    bad = np.nonzero(v[1:] < -np.broadcast_to(slack, v.shape)[1:])[0]
    if len(bad):
        k = int(bad[0]) + 1
        raise NotPositiveDefiniteError(f"coefficient {k} is negative: {v[k]:.6g}")


def l2_discrepancy_spectral(Z, table, workers=None):
    """(D^2, tail_bound) with D^2 = sum_{k=1}^K Fhat(k) b_k(Z).

    The tail bound uses b_k <= a_k and the table's decay law."""
    check_positive_definite(table)
    b = spectral_moments(Z, table.K, table.ctx, workers=workers)
    value = float(np.dot(np.clip(table.values[1:], 0.0, None), b[1:]))
    return value, spectral_tail_bound(table)


@dataclass(frozen=True)
class StolarskyReport:
    lhs: float
    d_squared: float
    i_sigma: float
    residual: float
    truncation_bound: float
    slack: float
    K: int
    N: int

    @property
    def passed(self):
        return self.residual <= self.truncation_bound + self.slack

    def to_dict(self):
        out = asdict(self)
        out["passed"] = self.passed
        return out


def stolarsky_check(Z, spec, ctx, K, workers=None):
    """Evaluate the three terms of the identity independently: the direct
    double sum (with diagonal), the spectral D^2 and I_F(sigma) by quadrature."""
    ctx = _as_ctx(ctx)
    table = coefficient_table(spec, ctx, K)
    lhs = measure_energy(MeasureSpec.discrete(Z), spec, ctx)
    d2, bound = l2_discrepancy_spectral(Z, table, workers=workers)
    i_sigma = uniform_energy(ctx, spec)
    residual = abs(lhs - d2 - i_sigma)
    # rounding in the N^2 sum and the per-entry quadrature error of the table
    a = harmonic_dims(K, ctx)
    tol = np.zeros(K + 1) if table.tol is None else table.tol
    scale = max(1.0, abs(lhs), abs(i_sigma))
    slack = float(np.dot(tol[1:], a[1:]) + 1e-13 * scale)
    return StolarskyReport(lhs, d2, i_sigma, residual, float(bound), slack, K, Z.N)


# ---------------------------------------------------------------------------
# cap discrepancy


@dataclass(frozen=True)
class CapDiscrepancy:
    value: float
    stderr: float
    method: str
    budget: int = 0

    def to_dict(self):
        return asdict(self)


def cap_measure(t, ctx):
    """sigma({x : x . p >= t}) = I_{(1-t)/2}(d/2, d/2)."""
    ctx = _as_ctx(ctx)
    t = np.clip(np.asarray(t, dtype=float), -1.0, 1.0)
    return betainc(ctx.d / 2.0, ctx.d / 2.0, (1.0 - t) / 2.0)


def mean_abs_coordinate(d):
    """E|x_1| for x uniform on S^d."""
    return float(np.exp(gammaln((d + 1) / 2.0) - 0.5 * np.log(pi) - gammaln(d / 2.0 + 1.0)))


def mean_chordal_distance(ctx):
    """int int |x - y| d sigma d sigma = kappa int_0^pi 2 sin(th/2) sin^(d-1) th dth."""
    ctx = _as_ctx(ctx)
    g = lambda th: 2.0 * np.sin(th / 2.0) * np.sin(th) ** (2 * ctx.lam)
    return kappa(ctx.lam) * integrate_theta_singular(g, 0.0, ctx)


def chordal_pair_mean(Z, block=512):
    P = Z.points
    total = 0.0
    for i0 in range(0, Z.N, block):
        T = np.clip(P[i0:i0 + block] @ P.T, -1.0, 1.0)
        total += float(np.sum(np.sqrt(2.0 - 2.0 * T)))
    return total / Z.N ** 2


def _cap_monte_carlo(Z, ctx, budget, seed, per_direction=64, batch=1024):
    # budget uniform (x, t) samples, drawn as ``per_direction`` iid heights for
    # each direction x: one sort of the inner products then counts every cap
    # around x by binary search.  The standard error comes from the spread of
    # the per-direction means, which are iid.
    rng = np.random.default_rng(seed)
    P = Z.points
    m = max(1, min(per_direction, budget))
    n_dir = -(-budget // m)
    means = []
    left = n_dir
    while left > 0:
        b = min(batch, left)
        x = rng.standard_normal((b, ctx.d + 1))
        x /= np.linalg.norm(x, axis=1, keepdims=True)
        t = rng.uniform(-1.0, 1.0, (b, m))
        S = np.sort(x @ P.T, axis=1)
        count = np.array([Z.N - np.searchsorted(row, tr, side="left") for row, tr in zip(S, t)])
        dev = (count / Z.N - cap_measure(t, ctx)) ** 2
        means.append(2.0 * dev.mean(axis=1))
        left -= b
    v = np.concatenate(means)
    se = float(v.std(ddof=1) / np.sqrt(len(v))) if len(v) > 1 else float("inf")
    return float(v.mean()), se


def _cap_spectral(Z, ctx, K, workers=None):
    # D^2 = sum_n c_n b_n.  For n > K the moments are replaced by their
    # diagonal part a_n / N (the off-diagonal part averages out at degrees far
    # above the point spacing); that tail, extended by a fitted n^-2 law for
    # c_n a_n, is reported as the error scale.
    K_tail = 4 * K
    c = cap_l2_weights(K_tail, ctx)
    b = spectral_moments(Z, K, ctx, workers=workers)
    head = float(np.dot(c[1:K + 1], b[1:]))
    a = harmonic_dims(K_tail, ctx)
    ca = c * a
    k = np.arange(K_tail // 2, K_tail + 1)
    C = float(np.mean(ca[k] * k ** 2.0))
    tail = (float(np.sum(ca[K + 1:])) + C / K_tail) / Z.N
    return head + tail, tail


def cap_discrepancy(Z, ctx=None, method="spectral", budget=None, seed=0, target_stderr=None, workers=None):
    """L2 spherical-cap discrepancy D^2 = int_{-1}^1 int |#(Z cap B(x,t))/N - sigma(B(x,t))|^2 dsigma dt.

    ``budget`` is the number of (x, t) samples for monte_carlo and the degree
    cutoff K for spectral.  The euclidean_oracle uses
    D^2 = (E|x_1| / 2) (int int |x - y| - N^-2 sum |z_i - z_j|).
    """
    ctx = Z.ctx if ctx is None else _as_ctx(ctx)
    if ctx.d < 2 and method != "monte_carlo":
        raise DomainError("cap coefficients need d >= 2")
    if method == "monte_carlo":
        budget = budget or 200_000
        v, se = _cap_monte_carlo(Z, ctx, int(budget), seed)
        if target_stderr is not None and se > target_stderr:
            need = int(budget * (se / target_stderr) ** 2) + 1
            raise CertificationError(f"budget {budget} gives stderr {se:.3g}; about {need} samples needed")
        return CapDiscrepancy(v, se, method, int(budget))
    if method == "spectral":
        K = int(budget or max(64, 32 * ceil(Z.N ** (1.0 / ctx.d))))
        v, tail = _cap_spectral(Z, ctx, K, workers)
        return CapDiscrepancy(v, tail, method, K)
    if method == "euclidean_oracle":
        c = 0.5 * mean_abs_coordinate(ctx.d)
        v = c * (mean_chordal_distance(ctx) - chordal_pair_mean(Z))
        return CapDiscrepancy(float(v), 1e-14 * max(1.0, abs(v)), method, 0)
    raise DomainError(f"unknown cap discrepancy method {method!r}")


# ---------------------------------------------------------------------------
# bounds and the Cesaro demonstration


def discrepancy_bounds_check(ctx, table, N, measured=None, c=1.0, c_prime=1.0, bracket=(0.05, 20.0)):
    """Evaluate min_{1<=k<=c N^(1/d)} Fhat(k) and N^-1 max_{th <= c' N^(-1/d)} (F(1) - F(cos th)).

    With ``measured`` (a D^2 value) the ratios to both expressions are
    reported and checked against ``bracket``.
    """
    ctx = _as_ctx(ctx)
    check_positive_definite(table)
    kmax = max(1, int(np.floor(c * N ** (1.0 / ctx.d))))
    if kmax > table.K:
        raise DomainError(f"table too short: need K >= {kmax}")
    lower = float(np.min(table.values[1:kmax + 1]))
    th = np.linspace(0.0, c_prime * N ** (-1.0 / ctx.d), 257)
    spec = table.spec
    F = spec.value_t(np.cos(th), ctx)
    upper = float(np.max(F[0] - F)) / N
    out = {"N": N, "d": ctx.d, "lower": lower, "upper": upper, "k_max": kmax}
    if measured is not None:
        out["measured"] = float(measured)
        out["ratio_lower"] = measured / lower
        out["ratio_upper"] = measured / upper
        lo, hi = bracket
        out["passed"] = bool(lo <= measured / lower <= hi and lo <= measured / upper <= hi)
    return out


def cesaro_mean(Z, n, x):
    """N^-1 sum_j K_n(x . z_j) at the rows of x."""
    ctx = Z.ctx
    w = cesaro_weights(n, ctx)
    coef = w * harmonic_dims(n, ctx)
    T = np.clip(x @ Z.points.T, -1.0, 1.0)
    acc = np.zeros_like(T)
    for k, r in enumerate(iter_normalized(n, ctx.lam, T)):
        acc += coef[k] * r
    return acc.mean(axis=1)


def cesaro_deviation(Z, a=8.0, method="spectral"):
    """int |1 - N^-1 sum_j K_n(x . z_j)|^2 dsigma(x) with n = ceil(a N^(1/d)).

    Returns ``(n, value, premise)`` where ``premise`` = K_n(1) / (2 N); the
    positive lower bound on the integral is only guaranteed once it exceeds 2
    (a large enough).  ``spectral``: sum_{k=1}^n w_k^2 b_k; ``product``:
    Gauss-Legendre in cos(theta) times the trapezoid rule in phi on S^2,
    exact for the degree-2n integrand.
    """
    ctx = Z.ctx
    n = int(ceil(a * Z.N ** (1.0 / ctx.d)))
    premise = float(np.dot(cesaro_weights(n, ctx), harmonic_dims(n, ctx))) / (2.0 * Z.N)
    if method == "spectral":
        w = cesaro_weights(n, ctx)
        b = spectral_moments(Z, n, ctx)
        return n, float(np.dot(w[1:] ** 2, b[1:])), premise
    if method == "product":
        if ctx.d != 2:
            raise DomainError("product quadrature is implemented for d = 2")
        z, wz = np.polynomial.legendre.leggauss(n + 1)
        m = 2 * n + 1
        phi = 2 * pi * np.arange(m) / m
        r = np.sqrt(1.0 - z * z)
        X = np.stack([np.outer(r, np.cos(phi)), np.outer(r, np.sin(phi)), np.repeat(z[:, None], m, axis=1)], axis=-1)
        vals = cesaro_mean(Z, n, X.reshape(-1, 3)).reshape(len(z), m)
        integral = np.sum(wz[:, None] * (1.0 - vals) ** 2) / m / 2.0
        return n, float(integral), premise
    raise DomainError(f"unknown method {method!r}")
