"""Gegenbauer machinery on S^d: polynomials, zonal kernels, harmonic dimensions,
connection coefficients and Cesaro kernels.

Throughout, ``lam = (d - 1) / 2``.  The circle (d = 1, lam = 0) is handled by
explicit Chebyshev branches rather than as a limit of the lam-recurrence.
"""
from dataclasses import dataclass, field
from math import comb

import numpy as np
from scipy.special import gammaln

from .errors import DomainError


@dataclass(frozen=True)
class SphereContext:
    """Dimension ``d`` of the sphere S^d and its Gegenbauer index ``lam``."""

    d: int
    lam: float = field(init=False)

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise DomainError(f"sphere dimension must be an integer >= 1, got {self.d!r}")
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "lam", (self.d - 1) / 2.0)

    @property
    def is_circle(self):
        return self.d == 1

    @property
    def ambient(self):
        return self.d + 1


def _as_ctx(ctx):
    return ctx if isinstance(ctx, SphereContext) else SphereContext(int(ctx))


def _check_args(n, t):
    if int(n) != n or n < 0:
        raise DomainError(f"degree must be a non-negative integer, got {n!r}")
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > 1.0 + 1e-15) or np.any(np.isnan(t)):
        raise DomainError("argument t must lie in [-1, 1]")
    return int(n), np.clip(t, -1.0, 1.0)


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def chebyshev_t(n, t):
    """T_n(t) = cos(n arccos t)."""
    n, t = _check_args(n, t)
    return _scalar(np.cos(n * np.arccos(t)))


def log_gegenbauer_at_one(n, lam):
    """log C_n^lam(1) = log[(2 lam)_n / n!] for lam > 0."""
    return gammaln(n + 2 * lam) - gammaln(n + 1) - gammaln(2 * lam)


def gegenbauer_eval(n, lam, t):
    """C_n^lam(t) by the three-term recurrence; Chebyshev T_n when lam == 0.

    Internally the recurrence runs on the normalized polynomials R_n (bounded
    by 1) and is rescaled by C_n(1) at the end, so nothing overflows for large n.
    """
    if lam < 0:
        raise DomainError(f"lam must be >= 0, got {lam}")
    n, t = _check_args(n, t)
    if lam == 0:
        return _scalar(np.cos(n * np.arccos(t)))
    r = _normalized_recurrence(n, lam, t)
    return _scalar(r * np.exp(log_gegenbauer_at_one(n, lam)))


def _normalized_recurrence(n, lam, t):
    r_prev = np.ones_like(t)
    if n == 0:
        return r_prev
    r = t.copy()
    for k in range(1, n):
        r_prev, r = r, (2.0 * (k + lam) * t * r - k * r_prev) / (k + 2.0 * lam)
    return r


def gegenbauer_normalized(n, ctx, t):
    """R_n^lam(t) = C_n^lam(t) / C_n^lam(1); T_n(t) on the circle."""
    ctx = _as_ctx(ctx)
    n, t = _check_args(n, t)
    if ctx.is_circle:
        return _scalar(np.cos(n * np.arccos(t)))
    return _scalar(_normalized_recurrence(n, ctx.lam, t))


def normalized_derivative(n, lam, t):
    """d/dt R_n^lam(t) = n (n + 2 lam) / (2 lam + 1) R_{n-1}^{lam+1}(t); lam = 0 included."""
    if lam < 0:
        raise DomainError(f"lam must be >= 0, got {lam}")
    n, t = _check_args(n, t)
    if n == 0:
        return _scalar(np.zeros_like(t))
    c = n * (n + 2.0 * lam) / (2.0 * lam + 1.0)
    return _scalar(c * _normalized_recurrence(n - 1, lam + 1.0, t))


def normalized_table(K, lam, t):
    """Rows R_0..R_K of the normalized Gegenbauer family at the points ``t``.

    Returns an array of shape ``(K + 1,) + t.shape``.  For lam == 0 the same
    recurrence yields T_n (it reduces to T_{n+1} = 2t T_n - T_{n-1}).
    """
    t = np.asarray(t, dtype=float)
    out = np.empty((K + 1,) + t.shape)
    out[0] = 1.0
    if K >= 1:
        out[1] = t
    for k in range(1, K):
        out[k + 1] = (2.0 * (k + lam) * t * out[k] - k * out[k - 1]) / (k + 2.0 * lam)
    return out


def iter_normalized(K, lam, t):
    """Yield R_0(t), R_1(t), ..., R_K(t) without storing the whole table."""
    t = np.asarray(t, dtype=float)
    r_prev = np.ones_like(t)
    yield r_prev
    if K == 0:
        return
    r = t.copy()
    yield r
    for k in range(1, K):
        r_prev, r = r, (2.0 * (k + lam) * t * r - k * r_prev) / (k + 2.0 * lam)
        yield r


def harmonic_dim(n, ctx):
    """Dimension a_n^d of degree-n spherical harmonics on S^d (exact integer)."""
    ctx = _as_ctx(ctx)
    if int(n) != n or n < 0:
        raise DomainError(f"degree must be a non-negative integer, got {n!r}")
    n = int(n)
    if n == 0:
        return 1
    d = ctx.d
    if d == 1:
        return 2
    # (n + lam)/lam * C_n^lam(1) = (2n + d - 1)/(d - 1) * binom(n + d - 2, n)
    return (2 * n + d - 1) * comb(n + d - 2, n) // (d - 1)


def harmonic_dims(K, ctx):
    return np.array([harmonic_dim(n, ctx) for n in range(K + 1)], dtype=float)


def zonal_eval(n, ctx, t):
    """Zonal kernel (n + lam)/lam C_n^lam(t); 2 T_n(t) on the circle (1 for n = 0)."""
    ctx = _as_ctx(ctx)
    n, t = _check_args(n, t)
    if ctx.is_circle:
        return _scalar(np.ones_like(t) if n == 0 else 2.0 * np.cos(n * np.arccos(t)))
    return _scalar(harmonic_dim(n, ctx) * _normalized_recurrence(n, ctx.lam, t))


def zonal_table(K, ctx, t):
    """Rows zonal_eval(0..K) at ``t``, shape ``(K + 1,) + t.shape``."""
    ctx = _as_ctx(ctx)
    tab = normalized_table(K, ctx.lam, t)
    dims = harmonic_dims(K, ctx)
    return tab * dims.reshape((-1,) + (1,) * (tab.ndim - 1))


def log_gegenbauer_connection(k, n, lam, mu):
    """log of the connection coefficient alpha_{k,n}^{lam,mu} (vectorized in k, n)."""
    if not (0 < lam < mu < 2 * lam + 1):
        raise DomainError(f"need 0 < lam < mu < 2 lam + 1, got lam={lam}, mu={mu}")
    k = np.asarray(k, dtype=float)
    n = np.asarray(n, dtype=float)
    if np.any(k < 0) or np.any(n < 0):
        raise DomainError("k and n must be non-negative")
    return (
        gammaln(2 * lam) + gammaln(mu) + 2 * (mu - lam) * np.log(2.0)
        + np.log(n + 2 * k + mu) + gammaln(n + k + mu) + gammaln(k + mu - lam)
        - gammaln(2 * mu) - gammaln(mu - lam) - gammaln(lam)
        - gammaln(k + 1) - gammaln(n + k + lam + 1)
    )


def gegenbauer_connection(k, n, lam, mu):
    """Coefficient alpha_{k,n}^{lam,mu} in

        sin^{2 lam}(th) R_n^lam(cos th) = sum_k alpha_{k,n} R_{n+2k}^mu(cos th) sin^{2 mu}(th),

    valid for 0 < lam < mu < 2 lam + 1.  Evaluated through log-gamma.
    """
    return _scalar(np.exp(log_gegenbauer_connection(k, n, lam, mu)))


def connection_partial_sum(n, lam, mu, theta, K):
    """Right-hand side of the connection expansion truncated at k <= K.

    Returns ``(partial_sum, envelope)`` where ``envelope`` estimates the size of
    the oscillating tail: the last term amplitude over 2 sin(2 theta)-type
    cancellation factor, taken from the final window of terms.
    """
    theta = float(theta)
    x = np.cos(theta)
    s2mu = np.sin(theta) ** (2 * mu)
    rows = np.fromiter(iter_normalized_scalar(n + 2 * K, mu, x), dtype=float, count=n + 2 * K + 1)
    k = np.arange(K + 1)
    terms = np.exp(log_gegenbauer_connection(k, n, lam, mu)) * rows[n + 2 * k] * s2mu
    window = terms[-max(1, K // 10):]
    envelope = np.max(np.abs(window)) / max(abs(np.sin(theta)), 1e-300)
    return float(np.sum(terms)), float(envelope)


def iter_normalized_scalar(K, lam, x):
    r_prev = 1.0
    yield r_prev
    if K == 0:
        return
    r = float(x)
    yield r
    for k in range(1, K):
        r_prev, r = r, (2.0 * (k + lam) * x * r - k * r_prev) / (k + 2.0 * lam)
        yield r


def connection_reconstruct(n, lam, mu, theta, tol=1e-9, K0=1024, K_max=2 ** 20):
    """Sum the connection expansion, doubling K until the tail envelope < tol.

    Returns ``(value, K, envelope)``.
    """
    K = K0
    while True:
        value, env = connection_partial_sum(n, lam, mu, theta, K)
        if env < tol or K >= K_max:
            return value, K, env
        K *= 2


def log_cesaro_ratio(n, k, order):
    """log(A_{n-k}^order / A_n^order), A_j^a = Gamma(j + a + 1)/(Gamma(j + 1) Gamma(a + 1))."""
    j = n - np.asarray(k, dtype=float)
    return (gammaln(j + order + 1) - gammaln(j + 1)) - (gammaln(n + order + 1) - gammaln(n + 1))


def cesaro_weights(n, ctx):
    """Weights A_{n-k}^{d+1}/A_n^{d+1}, k = 0..n."""
    ctx = _as_ctx(ctx)
    return np.exp(log_cesaro_ratio(n, np.arange(n + 1), ctx.d + 1))


def cesaro_kernel(n, ctx, t):
    """Cesaro kernel of order d + 1: sum_k A_{n-k}^{d+1}/A_n^{d+1} zonal_eval(k, ctx, t)."""
    ctx = _as_ctx(ctx)
    n, t = _check_args(n, t)
    w = cesaro_weights(n, ctx)
    dims = harmonic_dims(n, ctx)
    coef = w * dims
    if ctx.is_circle:
        coef[1:] = 2.0 * w[1:]
    acc = np.zeros_like(t)
    for k, r in enumerate(iter_normalized(n, ctx.lam, t)):
        acc = acc + coef[k] * r
    return _scalar(acc)
