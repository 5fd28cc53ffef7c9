"""One-dimensional quadrature: Gauss-Jacobi rules for (1 - t^2)^(lam - 1/2) and
graded composite rules in the angle variable for integrands with a power
singularity at theta = 0.
"""
from dataclasses import dataclass
from functools import lru_cache
from math import ceil, pi

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import gammaln, roots_jacobi, roots_legendre

from .errors import DomainError, QuadratureError
from .specfun import SphereContext, _as_ctx


def weight_mass(lam):
    """Integral of (1 - t^2)^(lam - 1/2) over [-1, 1]."""
    return float(np.exp(0.5 * np.log(pi) + gammaln(lam + 0.5) - gammaln(lam + 1.0)))


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    lam: float

    @property
    def order(self):
        return len(self.nodes)

    def __call__(self, f):
        return float(np.dot(self.weights, f(self.nodes)))


def _jacobi_matrix(lam, m):
    # monic recurrence for the Gegenbauer weight: alpha_k = 0,
    # beta_k = k (k + 2 lam - 1) / (4 (k + lam)(k + lam - 1)), beta_1 = 1 / (2 (1 + lam))
    k = np.arange(1, m, dtype=float)
    beta = np.empty(m - 1)
    if m > 1:
        beta[0] = 1.0 / (2.0 * (1.0 + lam))
        kk = k[1:]
        beta[1:] = kk * (kk + 2 * lam - 1) / (4.0 * (kk + lam) * (kk + lam - 1))
    return np.zeros(m), np.sqrt(beta)


@lru_cache(maxsize=64)
def _gauss_jacobi_cached(lam, m):
    diag, off = _jacobi_matrix(lam, m)
    try:
        x = eigh_tridiagonal(diag, off, eigvals_only=True)
    except np.linalg.LinAlgError as exc:
        raise QuadratureError(f"eigen-solve failed for m={m}, lam={lam}") from exc
    # Christoffel numbers 1 / sum_k p_k(x)^2 over the orthonormal family;
    # avoids the O(m^2) eigenvector matrix and keeps small edge weights accurate
    p_prev = np.zeros_like(x)
    p = np.full_like(x, 1.0 / np.sqrt(weight_mass(lam)))
    acc = p * p
    for k in range(m - 1):
        b_prev = off[k - 1] if k > 0 else 0.0
        p_prev, p = p, (x * p - b_prev * p_prev) / off[k]
        acc += p * p
    w = 1.0 / acc
    # symmetrize: the weight is even
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_jacobi_rule(lam, m):
    """Golub-Welsch Gauss rule with ``m`` nodes for the weight (1 - t^2)^(lam - 1/2)."""
    if lam < 0:
        raise DomainError(f"lam must be >= 0, got {lam}")
    if int(m) != m or m < 1:
        raise DomainError(f"node count must be a positive integer, got {m!r}")
    x, w = _gauss_jacobi_cached(float(lam), int(m))
    return QuadratureRule(x, w, float(lam))


def integrate_weighted(f, lam, m):
    """Integral of f(t) (1 - t^2)^(lam - 1/2) over [-1, 1] with an m-node rule."""
    return gauss_jacobi_rule(lam, m)(f)


def default_node_count(n):
    """Node count for coefficient integrals of degree n."""
    return 200 if n <= 256 else 2 * n


@lru_cache(maxsize=16)
def _legendre(q):
    x, w = roots_legendre(q)
    return x, w


@lru_cache(maxsize=64)
def _endcap(q, beta):
    # Gauss-Jacobi on [-1, 1] for weight (1 + x)^beta
    x, w = roots_jacobi(q, 0.0, beta)
    return x, w


@dataclass(frozen=True)
class ThetaRule:
    """Composite rule on [0, pi]: uniform panels, geometric grading toward 0,
    and an end-cap panel [0, h] carrying the exact power weight theta^beta.

    ``nodes``/``weights`` integrate g directly: the end-cap weights already
    include the factor theta^-beta so that sum(w * g(nodes)) approximates the
    integral of g whenever g(theta) / theta^beta is smooth near 0.
    """

    nodes: np.ndarray
    weights: np.ndarray
    depth: int
    endcap: float

    def __call__(self, g):
        return float(np.dot(self.weights, g(self.nodes)))


def _panel_nodes(a, b, q):
    x, w = _legendre(q)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def _endcap_nodes(h, beta, q):
    x, w = _endcap(q, float(beta))
    theta = 0.5 * h * (x + 1.0)
    # (theta)^beta = (h/2)^beta (1 + x)^beta, dtheta = h/2 dx
    return theta, w * (0.5 * h) ** (1.0 + beta) / theta ** beta


def theta_rule(beta, n_osc=0, depth=40, order=24, upper=pi):
    """Fixed composite rule (no adaptivity) used for batched coefficient tables.

    ``beta`` is the exponent of the pure power behaviour at theta = 0 of the
    integrand (for coefficient integrals beta = delta + 2 lam), ``n_osc`` the
    highest polynomial degree to resolve, ``depth`` the number of graded panels.
    """
    if beta <= -1:
        raise DomainError(f"end-cap exponent must exceed -1, got {beta}")
    width = min(pi / 4, 4 * pi / max(n_osc, 1))
    n_panels = max(1, ceil((upper - width) / width))
    edges = np.linspace(width, upper, n_panels + 1)
    xs, ws = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        x, w = _panel_nodes(a, b, order)
        xs.append(x)
        ws.append(w)
    hi = width
    for _ in range(depth):
        lo = 0.5 * hi
        x, w = _panel_nodes(lo, hi, order)
        xs.append(x)
        ws.append(w)
        hi = lo
    x, w = _endcap_nodes(hi, beta, order)
    xs.append(x)
    ws.append(w)
    return ThetaRule(np.concatenate(xs), np.concatenate(ws), depth, hi)


def integrate_theta_singular(g, delta, ctx, tol=1e-12, max_depth=60, n_osc=0, order=24):
    """Adaptive graded quadrature of g over (0, pi].

    The integrand is assumed to behave like theta^(delta + 2 lam) times a smooth
    function near 0 (g = theta^delta h with h containing sin^(2 lam)).  Panels
    are halved toward 0 until two end-cap estimates (orders q and 2q, both with
    the exact power weight) agree to ``tol``.  ``n_osc`` is the degree of any
    oscillating factor, used to size the outer panels.
    """
    ctx = _as_ctx(ctx)
    lam = ctx.lam
    if delta <= -(2 * lam + 1):
        raise DomainError(f"integral diverges: delta={delta} <= -(2 lam + 1) = {-(2 * lam + 1)}")
    beta = delta + 2 * lam
    width = min(pi / 4, 4 * pi / max(n_osc, 1))
    n_panels = max(1, ceil((pi - width) / width))
    edges = np.linspace(width, pi, n_panels + 1)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        x, w = _panel_nodes(a, b, order)
        total += float(np.dot(w, g(x)))
    hi = width
    for level in range(max_depth + 1):
        cap1 = _endcap_nodes(hi, beta, order)
        cap2 = _endcap_nodes(hi, beta, 2 * order)
        e1 = float(np.dot(cap1[1], g(cap1[0])))
        e2 = float(np.dot(cap2[1], g(cap2[0])))
        if level >= 2 and abs(e1 - e2) < tol * max(1.0, abs(total)):
            return total + e2
        if level == max_depth:
            break
        lo = 0.5 * hi
        x, w = _panel_nodes(lo, hi, order)
        total += float(np.dot(w, g(x)))
        hi = lo
    raise QuadratureError(
        f"graded quadrature did not converge after {max_depth} levels", partial=total + e2
    )


def gauss_legendre(g, a, b, q=64):
    x, w = _panel_nodes(a, b, q)
    return float(np.dot(w, g(x)))
