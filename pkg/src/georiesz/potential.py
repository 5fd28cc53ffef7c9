"""Potentials F on [-1, 1], evaluated in the angle variable theta = arccos t."""
from dataclasses import dataclass
from math import pi

import numpy as np

from .errors import DomainError

GEODESIC = "geodesic_power"
LOGARITHMIC = "logarithmic"
CAP = "cap_indicator"
SPECTRAL = "spectral_table"
KINDS = (GEODESIC, LOGARITHMIC, CAP, SPECTRAL)


@dataclass(frozen=True)
class PotentialSpec:
    """Which potential: (eps + theta)^delta, log(pi / (eps + theta)), the cap
    indicator of [t, 1], or a finite zonal expansion sum_n c_n zonal_n(t).

    ``sign`` and ``offset`` turn F into offset + sign * F; the positive definite
    form (pi/2)^delta - theta^delta is ``geodesic(delta, sign=-1, offset=(pi/2)^delta)``.
    """

    kind: str
    delta: float = 0.0
    epsilon: float = 0.0
    cap_height: float = 1.0
    table: tuple = ()
    sign: float = 1.0
    offset: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown potential kind {self.kind!r}")
        if not 0.0 <= self.epsilon < 1.0:
            raise DomainError(f"epsilon must lie in [0, 1), got {self.epsilon}")
        if self.kind == GEODESIC and self.delta == 0:
            raise DomainError("geodesic power with delta = 0: use the logarithmic kind")
        if self.kind == CAP and not -1.0 <= self.cap_height <= 1.0:
            raise DomainError(f"cap height must lie in [-1, 1], got {self.cap_height}")

    # constructors ---------------------------------------------------------
    @classmethod
    def geodesic(cls, delta, epsilon=0.0, sign=1.0, offset=0.0):
        return cls(GEODESIC, delta=float(delta), epsilon=float(epsilon), sign=sign, offset=offset)

    @classmethod
    def logarithmic(cls, epsilon=0.0):
        return cls(LOGARITHMIC, epsilon=float(epsilon))

    @classmethod
    def centered_geodesic(cls, delta):
        """(pi/2)^delta - theta^delta, positive definite for delta in (0, 1]."""
        return cls.geodesic(delta, sign=-1.0, offset=(pi / 2) ** delta)

    @classmethod
    def cap(cls, height):
        return cls(CAP, cap_height=float(height))

    @classmethod
    def spectral(cls, coefficients):
        return cls(SPECTRAL, table=tuple(float(c) for c in coefficients))

    # properties -----------------------------------------------------------
    @property
    def s(self):
        return -self.delta

    @property
    def is_power(self):
        return self.kind in (GEODESIC, LOGARITHMIC)

    @property
    def singular_exponent(self):
        """Exponent beta of the theta^beta behaviour at theta = 0 (0 if bounded)."""
        if self.kind == GEODESIC and self.epsilon == 0.0:
            return self.delta
        return 0.0

    @property
    def finite_at_one(self):
        if self.kind == GEODESIC:
            return self.delta > 0 or self.epsilon > 0
        if self.kind == LOGARITHMIC:
            return self.epsilon > 0
        return True

    def check_integrable(self, ctx):
        if self.kind == GEODESIC and self.epsilon == 0.0 and self.delta <= -ctx.d:
            raise DomainError(f"delta={self.delta} <= -d={-ctx.d}: energy integral diverges")

    # evaluation -----------------------------------------------------------
    def raw_theta(self, theta):
        theta = np.asarray(theta, dtype=float)
        if self.kind == GEODESIC:
            with np.errstate(divide="ignore"):
                return (self.epsilon + theta) ** self.delta
        if self.kind == LOGARITHMIC:
            with np.errstate(divide="ignore"):
                return np.log(pi / (self.epsilon + theta))
        if self.kind == CAP:
            return (np.cos(theta) >= self.cap_height).astype(float)
        raise DomainError("spectral potentials need a sphere context; use value_t(t, ctx)")

    def theta(self, theta):
        """F(cos theta)."""
        return self.offset + self.sign * self.raw_theta(theta)

    def value_t(self, t, ctx=None):
        """F(t), t in [-1, 1]."""
        t = np.clip(np.asarray(t, dtype=float), -1.0, 1.0)
        if self.kind == SPECTRAL:
            if ctx is None:
                raise DomainError("spectral potentials need a sphere context")
            from .specfun import zonal_table
            c = np.asarray(self.table)
            tab = zonal_table(len(c) - 1, ctx, t)
            return self.offset + self.sign * np.tensordot(c, tab, axes=1)
        return self.theta(np.arccos(t))

    def derivative_theta(self, theta):
        """dF/dtheta, used by the energy gradient."""
        theta = np.asarray(theta, dtype=float)
        if self.kind == GEODESIC:
            with np.errstate(divide="ignore"):
                return self.sign * self.delta * (self.epsilon + theta) ** (self.delta - 1)
        if self.kind == LOGARITHMIC:
            with np.errstate(divide="ignore"):
                return -self.sign / (self.epsilon + theta)
        raise DomainError(f"no angular derivative for kind {self.kind!r}")

    def describe(self):
        if self.kind == GEODESIC:
            return f"geodesic(delta={self.delta}, eps={self.epsilon})"
        if self.kind == LOGARITHMIC:
            return f"log(eps={self.epsilon})"
        if self.kind == CAP:
            return f"cap(t={self.cap_height})"
        return f"spectral(K={len(self.table) - 1})"
