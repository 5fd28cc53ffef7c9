"""Truncated Maclaurin series for the geodesic potentials and the moment route
to their Gegenbauer coefficients.

arccos t = pi/2 - A(t) with A(t) = arcsin t, an odd series with positive
coefficients.  With u = 2 A(t) / (pi + 2 eps),

    (eps + arccos t)^delta      = (pi/2 + eps)^delta * sum_j b_j u^j,   b_j = (-1)^j binom(delta, j)
    log(pi / (eps + arccos t))  = log(2 pi / (pi + 2 eps)) + sum_{j>=1} u^j / j.

Since u = O(t), the coefficient of t^k only involves j <= k, so composing up to
j = K gives the first K + 1 coefficients exactly (up to rounding).  The outer
sums are evaluated as (1 - u)^delta and -log(1 - u) through the usual O(K^2)
recurrences for powers and logarithms of power series; ``compose_outer`` is
the general Horner composition, kept as a cross-check.
"""
from dataclasses import dataclass
from math import pi

import numpy as np
from scipy.signal import fftconvolve
from scipy.special import betaln, gammaln

from .coefficients import kappa
from .errors import CertificationError, DomainError
from .potential import GEODESIC, LOGARITHMIC
from .quadrature import gauss_jacobi_rule
from .specfun import _as_ctx, gegenbauer_eval

_FFT_MIN = 64
MAX_ORDER = 1 << 16


@dataclass(frozen=True)
class PowerSeries:
    """Coefficients c_0..c_K of t^k."""

    coefficients: np.ndarray

    @property
    def K(self):
        return len(self.coefficients) - 1

    def __getitem__(self, k):
        return self.coefficients[k]

    def __add__(self, other):
        other = _coerce(other, self.K)
        K = min(self.K, other.K)
        return PowerSeries(self.coefficients[:K + 1] + other.coefficients[:K + 1])

    __radd__ = __add__

    def __mul__(self, other):
        if np.isscalar(other):
            return PowerSeries(other * self.coefficients)
        K = min(self.K, other.K)
        return PowerSeries(truncated_product(self.coefficients[:K + 1], other.coefficients[:K + 1], K))

    __rmul__ = __mul__

    def __call__(self, t):
        return np.polynomial.polynomial.polyval(t, self.coefficients)

    def compose_outer(self, outer):
        """sum_j outer[j] * self^j by Horner; requires self[0] == 0."""
        if self.coefficients[0] != 0:
            raise DomainError("inner series must vanish at 0 for truncated composition")
        K = self.K
        outer = np.asarray(outer, dtype=float)
        J = min(len(outer) - 1, K)
        acc = np.zeros(K + 1)
        acc[0] = outer[J]
        for j in range(J - 1, -1, -1):
            acc = truncated_product(acc, self.coefficients, K)
            acc[0] += outer[j]
        return PowerSeries(acc)


def _coerce(x, K):
    if isinstance(x, PowerSeries):
        return x
    c = np.zeros(K + 1)
    c[0] = x
    return PowerSeries(c)


def truncated_product(a, b, K):
    if len(a) + len(b) < _FFT_MIN:
        return np.convolve(a, b)[:K + 1]
    return fftconvolve(a, b)[:K + 1]


def arccos_series(K):
    """Coefficients of A(t) = pi/2 - arccos t: binom(2n, n) / (4^n (2n + 1)) at t^(2n+1)."""
    if K < 1:
        raise DomainError("need K >= 1")
    if K > MAX_ORDER:
        raise DomainError(f"series order {K} exceeds the cap {MAX_ORDER}")
    c = np.zeros(K + 1)
    n = np.arange((K - 1) // 2 + 1)
    c[2 * n + 1] = np.exp(gammaln(2 * n + 1) - 2 * gammaln(n + 1) - n * np.log(4.0) - np.log(2 * n + 1))
    return PowerSeries(c)


def binomial_outer(delta, J):
    """b_j = (-1)^j binom(delta, j), j = 0..J, via the running product."""
    b = np.empty(J + 1)
    b[0] = 1.0
    for j in range(1, J + 1):
        b[j] = b[j - 1] * (j - 1 - delta) / j
    return b


def series_power(f, delta):
    """Coefficients of f^delta for f[0] > 0, from f g' = delta f' g:

        g_k = sum_{j=1}^{k} ((delta + 1) j - k) f_j g_{k-j} / (k f_0).

    O(K^2) and exact up to rounding, like the Horner composition it replaces.
    """
    f = np.asarray(f, dtype=float)
    if not f[0] > 0:
        raise DomainError("series_power needs a positive constant term")
    K = len(f) - 1
    g = np.empty(K + 1)
    g[0] = f[0] ** delta
    j = np.arange(1, K + 1, dtype=float)
    for k in range(1, K + 1):
        w = ((delta + 1.0) * j[:k] - k) * f[1:k + 1]
        g[k] = np.dot(w, g[k - 1::-1]) / (k * f[0])
    return g


def series_log(f):
    """Coefficients of log f for f[0] > 0, from f g' = f':

        g_k = (f_k - sum_{j=1}^{k-1} (j / k) g_j f_{k-j}) / f_0.
    """
    f = np.asarray(f, dtype=float)
    if not f[0] > 0:
        raise DomainError("series_log needs a positive constant term")
    K = len(f) - 1
    g = np.empty(K + 1)
    g[0] = np.log(f[0])
    j = np.arange(1, K + 1, dtype=float)
    for k in range(1, K + 1):
        g[k] = (f[k] - np.dot(j[:k - 1] * g[1:k], f[k - 1:0:-1]) / k) / f[0]
    return g


def potential_series(spec, K):
    """Maclaurin coefficients a_0..a_K of F_{delta,eps} (or the log potential)."""
    if spec.kind not in (GEODESIC, LOGARITHMIC):
        raise DomainError(f"no Maclaurin route for kind {spec.kind!r}")
    eps = spec.epsilon
    if not 0.0 <= eps < 1.0:
        raise DomainError(f"epsilon must lie in [0, 1), got {eps}")
    # F = (pi/2 + eps)^delta (1 - u)^delta, or log(2 pi / (pi + 2 eps)) - log(1 - u)
    one_minus_u = -(arccos_series(K) * (2.0 / (pi + 2.0 * eps))).coefficients
    one_minus_u[0] = 1.0
    if spec.kind == GEODESIC:
        series = (pi / 2 + eps) ** spec.delta * series_power(one_minus_u, spec.delta)
    else:
        series = -series_log(one_minus_u)
        series[0] += np.log(2 * pi / (pi + 2 * eps))
    c = spec.sign * series
    c[0] += spec.offset
    return PowerSeries(c)


def moment_integral(k, n, ctx):
    """int_{-1}^1 t^k C_n^lam(t) (1 - t^2)^(lam - 1/2) dt by an exact Gauss-Jacobi rule.

    On the circle (lam = 0) C_n is read as T_n.
    """
    ctx = _as_ctx(ctx)
    if k < 0 or n < 0:
        raise DomainError("k and n must be non-negative")
    if (k - n) % 2 or k < n:
        return 0.0
    m = (k + n) // 2 + 1
    rule = gauss_jacobi_rule(ctx.lam, m)
    return rule(lambda t: t ** k * gegenbauer_eval(n, ctx.lam, t))


def moment_table(K, n_max, lam):
    """M[k, n] = int t^k R_n^lam(t) w_lam(t) dt for k <= K, n <= n_max.

    Built from M[0, n] = mass * [n == 0] and t R_n = ((n + 2 lam) R_{n+1} + n R_{n-1}) / (2 (n + lam)),
    t R_0 = R_1.  Every update adds non-negative terms, so the table is stable.
    """
    W = K + n_max + 2
    cur = np.zeros(W)
    cur[0] = np.exp(betaln(0.5, lam + 0.5))
    out = np.empty((K + 1, n_max + 1))
    nn = np.arange(1, W - 1, dtype=float)
    a = (nn + 2 * lam) / (2 * (nn + lam))
    b = nn / (2 * (nn + lam))
    for k in range(K + 1):
        out[k] = cur[:n_max + 1]
        new = np.zeros(W)
        new[0] = cur[1]
        new[1:W - 1] = a * cur[2:W] + b * cur[0:W - 2]
        cur = new
    return out


@dataclass(frozen=True)
class SeriesCoefficient:
    """``value`` is the extrapolated estimate, ``partial`` the plain sum to K and
    ``tail_bound`` a rigorous bound on |Fhat(n) - partial| (inf if none)."""

    value: float
    partial: float
    tail_bound: float
    K: int
    monotone: bool

    @property
    def sign(self):
        return int(np.sign(self.partial))


def _tail_exponents(spec, lam, count):
    # partial-sum error ~ K^-p (1 + c1/K + ...): p = lam + 1 from the square-root
    # behaviour at t = +-1 when eps > 0; an extra family delta/2 + lam + 1/2 when
    # eps = 0 (the power singularity at t = 1).
    ps = [lam + 1 + i for i in range(count)]
    if spec.epsilon == 0.0:
        if spec.kind == GEODESIC:
            q = spec.delta / 2 + lam + 0.5
        else:
            q = lam + 0.5
        ps = sorted(set(ps) | {q + i for i in range(count)})[:count]
    return ps


def coefficient_via_series(spec, n, ctx, K=2048, ladder=5):
    """Fhat(n; lam) as kappa * sum_k a_k int t^k R_n w dt.

    The moments are non-negative and vanish unless k >= n with k - n even, so
    when a_k shares one sign for all k >= max(n, 1) the partial sums are monotone
    and certify the sign by themselves.  Otherwise the sign is certified by

        |sum_{k>K} a_k M_k| <= max_{k>K} M_k * |F(1) - sum_{k<=K} a_k|,

    valid when a_k (k > K) share a sign; it is infinite when F(1) is.  The
    sign pattern is checked on a_1..a_K.  ``value`` is a Richardson
    extrapolation of the partial sums at K / 2^j.
    """
    return series_coefficients(spec, n, ctx, K, ladder, degrees=[n])[0]


def series_coefficients(spec, n_max, ctx, K=2048, ladder=5, degrees=None):
    """SeriesCoefficient for every degree in ``degrees`` (default 0..n_max),
    sharing one Maclaurin series and one moment table."""
    ctx = _as_ctx(ctx)
    lam = ctx.lam
    if K < n_max:
        raise DomainError("need K >= n")
    a = potential_series(spec, K).coefficients
    M = moment_table(K, n_max, lam)
    tail = np.inf
    if (np.all(a[1:] <= 0) or np.all(a[1:] >= 0)) and spec.finite_at_one:
        f1 = float(spec.theta(0.0))
        m_next = kappa(lam) * float(np.exp(betaln((K + 2) / 2, lam + 0.5)))
        tail = m_next * abs(f1 - np.sum(a))
    out = []
    for n in range(n_max + 1) if degrees is None else degrees:
        partial = np.cumsum(kappa(lam) * a * M[:, n])
        Ks = [K >> j for j in range(ladder - 1, -1, -1)]
        Ks = [k - ((k - n) % 2) for k in Ks if k >= max(n, 16)]
        value = float(partial[K])
        if len(Ks) >= 2:
            ps = _tail_exponents(spec, lam, len(Ks) - 1)
            A = np.column_stack([np.ones(len(Ks))] + [np.asarray(Ks, float) ** (-p) for p in ps])
            value = float(np.linalg.solve(A, partial[Ks])[0])
        rest = a[max(n, 1):]
        monotone = bool(np.all(rest < 0) or np.all(rest > 0))
        if n == 0 and monotone:
            monotone = a[0] == 0 or np.sign(a[0]) == np.sign(a[1])
        s_K = float(partial[K])
        if not monotone and not tail < abs(s_K):
            raise CertificationError(f"tail bound {tail:.3g} does not certify the sign of the partial sum {s_K:.3g}")
        out.append(SeriesCoefficient(value, s_K, float(tail), K, monotone))
    return out


def certify_sign(spec, n, ctx, K=512):
    """Certified sign of Fhat(n) from the moment route."""
    return coefficient_via_series(spec, n, ctx, K=K, ladder=1).sign
