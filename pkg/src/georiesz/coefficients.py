"""Gegenbauer coefficients of the geodesic potentials, cap indicators and
finite spectral tables, computed in the theta = arccos t domain.

Normalization: F(t) ~ sum_n Fhat(n) zonal_n(t) with

    Fhat(n) = kappa * int_0^pi F(cos th) R_n(cos th) sin^(2 lam)(th) dth,
    kappa   = Gamma(lam + 1) / (Gamma(lam + 1/2) Gamma(1/2)).

On the circle this is kappa = 1/pi with R_n = T_n and zonal_n = 2 T_n (n >= 1),
i.e. Fhat(n) is half the classical cosine coefficient.
"""
import io
from dataclasses import dataclass, field
from functools import lru_cache
from math import pi

import numpy as np
from scipy.special import gammaln

from .errors import ConsistencyError, DomainError
from .potential import CAP, GEODESIC, LOGARITHMIC, SPECTRAL, PotentialSpec
from .quadrature import gauss_jacobi_rule, gauss_legendre, integrate_theta_singular, theta_rule
from .specfun import (
    SphereContext,
    _as_ctx,
    gegenbauer_normalized,
    harmonic_dims,
    iter_normalized,
    normalized_table,
    zonal_table,
)


def kappa(lam):
    """Prefactor Gamma(lam + 1) / (Gamma(lam + 1/2) Gamma(1/2))."""
    return float(np.exp(gammaln(lam + 1) - gammaln(lam + 0.5) - gammaln(0.5)))


@dataclass(frozen=True)
class CoefficientTable:
    ctx: SphereContext
    values: np.ndarray
    spec: PotentialSpec
    tol: np.ndarray = field(default=None)

    @property
    def K(self):
        return len(self.values) - 1

    def __getitem__(self, n):
        return self.values[n]

    def reconstruct(self, t):
        """Partial sum sum_n values[n] zonal_n(t)."""
        t = np.asarray(t, dtype=float)
        return np.tensordot(self.values, zonal_table(self.K, self.ctx, t), axes=1)

    def reconstruction_error(self, points=21):
        t = np.cos(np.linspace(0.05, pi - 0.05, points))
        return float(np.max(np.abs(self.reconstruct(t) - self.spec.value_t(t, self.ctx))))

    def zonal_weighted(self):
        """values[n] * a_n^d, the terms whose sum over n >= 1 is F(1) - Fhat(0)."""
        return self.values * harmonic_dims(self.K, self.ctx)

    def scaled(self, c):
        return CoefficientTable(self.ctx, c * self.values, self.spec, None if self.tol is None else abs(c) * self.tol)

    def to_text(self):
        buf = io.StringIO()
        buf.write("# n value abs_err\n")
        tol = np.zeros_like(self.values) if self.tol is None else self.tol
        for n, (v, e) in enumerate(zip(self.values, tol)):
            buf.write(f"{n} {v:.17g} {e:.17g}\n")
        return buf.getvalue()

    def write(self, path):
        with open(path, "w") as fh:
            fh.write(self.to_text())


def read_table(path, ctx, spec):
    data = np.loadtxt(path, comments="#", ndmin=2)
    if not np.array_equal(data[:, 0], np.arange(len(data))):
        raise ValueError(f"{path}: rows must list n = 0, 1, 2, ... in order")
    return CoefficientTable(_as_ctx(ctx), data[:, 1].copy(), spec, data[:, 2].copy())


def _check_spec(spec, ctx):
    spec.check_integrable(ctx)
    if spec.kind == GEODESIC and spec.epsilon == 0.0 and spec.delta <= -(2 * ctx.lam + 1):
        raise DomainError(f"delta={spec.delta} not integrable on S^{ctx.d}")


def gegenbauer_coefficient(spec, n, ctx, tol=1e-13, return_error=False):
    """Fhat(n; lam) of ``spec`` by graded quadrature in theta."""
    ctx = _as_ctx(ctx)
    _check_spec(spec, ctx)
    if n < 0 or int(n) != n:
        raise DomainError(f"degree must be a non-negative integer, got {n!r}")
    n = int(n)
    if spec.kind == SPECTRAL:
        v = spec.offset * (n == 0) + spec.sign * (spec.table[n] if n < len(spec.table) else 0.0)
        return (v, 0.0) if return_error else v
    if spec.kind == CAP:
        v = cap_indicator_coefficient(spec.cap_height, n, ctx)
        return (v, 1e-15) if return_error else v
    lam = ctx.lam
    k = kappa(lam)

    def g(th):
        return spec.theta(th) * gegenbauer_normalized(n, ctx, np.cos(th)) * np.sin(th) ** (2 * lam)

    delta = spec.singular_exponent
    v1 = k * integrate_theta_singular(g, delta, ctx, tol=tol, n_osc=n, order=24)
    if not return_error:
        return v1
    v2 = k * integrate_theta_singular(g, delta, ctx, tol=tol, n_osc=n, order=32)
    return v1, abs(v1 - v2) + 1e-16 * abs(v1)


def _batched(spec, ctx, K, order):
    lam = ctx.lam
    beta = spec.singular_exponent + 2 * lam
    rule = theta_rule(beta, n_osc=K, depth=48 if spec.kind == LOGARITHMIC else 16, order=order)
    th = rule.nodes
    wf = rule.weights * spec.theta(th) * np.sin(th) ** (2 * lam)
    x = np.cos(th)
    out = np.empty(K + 1)
    for k, r in enumerate(iter_normalized(K, lam, x)):
        out[k] = np.dot(wf, r)
    return kappa(lam) * out


def coefficient_table(spec, ctx, K, with_error=True):
    """Fhat(n; lam) for n = 0..K, all degrees from one shared composite rule."""
    ctx = _as_ctx(ctx)
    _check_spec(spec, ctx)
    if spec.kind == SPECTRAL:
        c = np.zeros(K + 1)
        m = min(K + 1, len(spec.table))
        c[:m] = spec.sign * np.asarray(spec.table[:m])
        c[0] += spec.offset
        return CoefficientTable(ctx, c, spec, np.zeros(K + 1))
    if spec.kind == CAP:
        vals = np.array([cap_indicator_coefficient(spec.cap_height, n, ctx) for n in range(K + 1)])
        return CoefficientTable(ctx, vals, spec, np.full(K + 1, 1e-15))
    v = _batched(spec, ctx, K, 24)
    err = None
    if with_error:
        v2 = _batched(spec, ctx, K, 32)
        err = np.abs(v - v2) + 1e-16 * np.max(np.abs(v))
    return CoefficientTable(ctx, v, spec, err)


# ---------------------------------------------------------------------------
# cap indicator


def _cap_direct(t, n, ctx, q=96):
    """kappa * int_t^1 R_n w dt = kappa * int_0^arccos(t) R_n(cos th) sin^(2 lam) th dth."""
    lam = ctx.lam
    th_t = float(np.arccos(np.clip(t, -1.0, 1.0)))
    if th_t == 0.0:
        return 0.0
    g = lambda th: gegenbauer_normalized(n, ctx, np.cos(th)) * np.sin(th) ** (2 * lam)
    return kappa(lam) * gauss_legendre(g, 0.0, th_t, q=q)


@lru_cache(maxsize=None)
def cap_constant(d):
    """Constant c_d in fhat_t(n) = c_d (1 - t^2)^(lam + 1/2) R_{n-1}^{lam+1}(t).

    Pinned from the n = 1 direct quadrature at t = 0, then both routes are
    compared on a grid of heights and degrees n <= 32.
    """
    ctx = SphereContext(d)
    if d < 2:
        raise DomainError("cap coefficients need d >= 2")
    c = _cap_direct(0.0, 1, ctx)
    for t in (-0.9, -0.5, -0.1, 0.3, 0.7, 0.95):
        for n in (1, 2, 3, 5, 8, 13, 21, 32):
            a = c * _cap_closed_unit(t, n, ctx.lam)
            b = _cap_direct(t, n, ctx)
            if abs(a - b) > 1e-9:
                raise ConsistencyError(f"cap coefficient routes disagree at t={t}, n={n}: {a} vs {b}")
    return c


def _cap_closed_unit(t, n, lam):
    return (1.0 - t * t) ** (lam + 0.5) * _R(n - 1, lam + 1.0, t)


def _R(n, lam, t):
    t = np.asarray(t, dtype=float)
    out = None
    for out in iter_normalized(n, lam, t):
        pass
    return out if np.ndim(out) else float(out)


def cap_coefficient(t, n, ctx):
    """Gegenbauer coefficient of the indicator of [t, 1], n >= 1 (closed form)."""
    ctx = _as_ctx(ctx)
    if n < 1:
        raise DomainError("cap_coefficient needs n >= 1; use cap_indicator_coefficient for n = 0")
    if np.any(np.abs(np.asarray(t)) > 1):
        raise DomainError("cap height must lie in [-1, 1]")
    return cap_constant(ctx.d) * _cap_closed_unit(np.asarray(t, dtype=float), n, ctx.lam)


def cap_indicator_coefficient(t, n, ctx):
    ctx = _as_ctx(ctx)
    if n == 0:
        return _cap_direct(t, 0, ctx)
    return float(cap_coefficient(t, n, ctx))


def cap_l2_weights(K, ctx):
    """c_n = int_{-1}^1 fhat_t(n)^2 dt for n = 0..K (c_0 = 0 by convention).

    fhat_t(n)^2 = c_d^2 (1 - t^2)^(2 lam + 1) R_{n-1}^{lam+1}(t)^2 is a polynomial
    against the Gegenbauer weight with index 2 lam + 3/2, so an (K+1)-node rule
    is exact.
    """
    ctx = _as_ctx(ctx)
    lam = ctx.lam
    rule = gauss_jacobi_rule(2 * lam + 1.5, K + 1)
    out = np.zeros(K + 1)
    c2 = cap_constant(ctx.d) ** 2
    for k, r in enumerate(iter_normalized(K - 1, lam + 1.0, rule.nodes)):
        out[k + 1] = c2 * np.dot(rule.weights, r * r)
    return out


# ---------------------------------------------------------------------------
# decay


def decay_exponent(table, n_min, n_max, parity=None):
    """Least-squares slope of log|Fhat(n)| against log n on [n_min, n_max].

    Entries within ten times their error estimate of zero are dropped; ``parity``
    (0 or 1) restricts to even or odd degrees.  Returns ``(slope, residual)``.
    """
    n = np.arange(n_min, n_max + 1)
    v = np.asarray(table.values)[n_min:n_max + 1]
    keep = np.abs(v) > 0
    if table.tol is not None:
        keep &= np.abs(v) > 10 * np.asarray(table.tol)[n_min:n_max + 1]
    if parity is not None:
        keep &= n % 2 == parity
    if keep.sum() < 4:
        raise DomainError(f"only {keep.sum()} usable coefficients in [{n_min}, {n_max}]")
    x, y = np.log(n[keep]), np.log(np.abs(v[keep]))
    (slope, icpt), res, *_ = np.polyfit(x, y, 1, full=True)
    rms = float(np.sqrt(res[0] / len(x))) if len(res) else 0.0
    return float(slope), rms


def decay_power(spec, ctx):
    """Exponent p with |Fhat(k)| a_k = O(k^-p): a_k ~ k^(d-1) and Fhat(k) ~ k^-(d+delta)
    for eps = 0; for eps > 0 the square-root behaviour at t = -1 gives k^-(d+1)."""
    if spec.kind == SPECTRAL:
        return np.inf
    if spec.kind == CAP:
        return 1.5 + ctx.lam
    if spec.kind == LOGARITHMIC:
        return 1.0 if spec.epsilon == 0.0 else 2.0
    if spec.epsilon == 0.0:
        return 1.0 + spec.delta
    return 2.0


def spectral_tail_bound(table, safety=2.0, p=None):
    """Bound on sum_{k>K} |Fhat(k)| a_k from the decay law.

    C is the largest |Fhat(k)| a_k k^p over the last decade of the table, and
    the tail is bounded by safety * C * int_K^inf x^-p dx.  Zero for spectral
    tables that the table covers; infinite when p <= 1.
    """
    spec, ctx, K = table.spec, table.ctx, table.K
    if spec.kind == SPECTRAL:
        return 0.0 if len(spec.table) <= K + 1 else float(np.sum(np.abs(spec.table[K + 1:]) * harmonic_dims(len(spec.table) - 1, ctx)[K + 1:]))
    p = decay_power(spec, ctx) if p is None else p
    if p <= 1.0:
        return np.inf
    k = np.arange(max(1, K // 10), K + 1)
    C = float(np.max(np.abs(table.values[k]) * harmonic_dims(K, ctx)[k] * k ** p))
    return safety * C * K ** (1.0 - p) / (p - 1.0)


def predicted_sign(spec, n, ctx):
    """Sign of Fhat(n) predicted by the Maclaurin sign pattern, or 0 if none."""
    if spec.kind == GEODESIC:
        if 0 < spec.delta < 1:
            return -1 if n >= 1 else 0
        if -(2 * ctx.lam + 1) < spec.delta < 0:
            return 1
        return 0
    if spec.kind == LOGARITHMIC:
        return 1
    return 0
