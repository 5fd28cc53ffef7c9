"""Experiment configurations: one frozen dataclass per CLI subcommand, loaded
from a JSON document with unknown keys rejected."""
import json
import sys
from dataclasses import asdict, dataclass, fields

from .errors import DomainError
from .potential import PotentialSpec


class ConfigError(ValueError):
    """Malformed or out-of-domain configuration (CLI exit code 2)."""


@dataclass(frozen=True)
class PotentialConfig:
    """Geodesic power (delta) or, with ``log`` set, the logarithmic potential."""

    d: int = 2
    delta: float = 0.5
    log: bool = False
    epsilon: float = 0.0

    def spec(self):
        try:
            if self.log:
                return PotentialSpec.logarithmic(self.epsilon)
            return PotentialSpec.geodesic(self.delta, self.epsilon)
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc

    def validate(self):
        if self.d < 1:
            raise ConfigError(f"d must be >= 1, got {self.d}")
        if not self.log and self.epsilon == 0.0 and self.delta <= -self.d:
            raise ConfigError(f"delta={self.delta} must exceed -d={-self.d}")
        self.spec()

    @property
    def label(self):
        return "log" if self.log else f"{self.delta:g}"


@dataclass(frozen=True)
class CoeffsConfig(PotentialConfig):
    K: int = 64
    tol: float = 1e-13


@dataclass(frozen=True)
class DecayConfig(PotentialConfig):
    n_min: int = 16
    n_max: int = 256
    slope_tol: float = 0.15
    parity: int = None


@dataclass(frozen=True)
class GapScanConfig(PotentialConfig):
    Ns: tuple = (64, 128, 256, 512, 1024, 2048, 4096)
    starts: tuple = ("fibonacci", "equal_area_centers")
    iterations: int = 15
    step: float = 0.05
    fit_skip: int = 2
    exponent_tol: float = 0.15
    log_ratio_range: tuple = (0.6, 1.7)
    min_cells: int = 5


@dataclass(frozen=True)
class ExtremizersConfig(PotentialConfig):
    N: int = 64
    n_random: int = 20
    degrees: tuple = (1, 2, 3, 4)
    amplitudes: tuple = (0.1, 0.3)
    regularization: float = 0.1
    symmetric_tol: float = 1e-10


@dataclass(frozen=True)
class StolarskyConfig:
    ds: tuple = (1, 2)
    Ns: tuple = (8, 32, 128)
    deltas: tuple = (0.5, 1.0)
    K1: int = 4096
    K2: int = 2048
    spectral_K: int = 12
    generator: str = "random_uniform"

    def validate(self):
        if any(d not in (1, 2) for d in self.ds):
            raise ConfigError("stolarsky cases are defined for d in {1, 2}")
        if any(not 0 < x <= 1 for x in self.deltas):
            raise ConfigError("centered geodesic potentials need delta in (0, 1]")


@dataclass(frozen=True)
class CapConfig:
    d: int = 2
    Ns: tuple = (64, 128, 256, 512, 1024, 2048, 4096)
    generator: str = "fibonacci"
    slope: float = -1.5
    slope_tol: float = 0.1
    compare_N: int = 1024
    mc_budget: int = 1_000_000
    spectral_K: int = 1024

    def validate(self):
        if self.d != 2:
            raise ConfigError("the cap scan runs on S^2")


@dataclass(frozen=True)
class OptimizeConfig(PotentialConfig):
    N: int = 64
    generator: str = "random_uniform"
    iterations: int = 200
    step: float = 0.05
    starts: int = 1
    input: str = None


@dataclass(frozen=True)
class GenConfig:
    kind: str = "fibonacci"
    N: int = 64
    d: int = 2

    def validate(self):
        from .pointsets import GENERATORS
        if self.kind not in GENERATORS:
            raise ConfigError(f"unknown generator {self.kind!r}")
        if self.N < 1:
            raise ConfigError("N must be >= 1")


SCHEMAS = {
    "coeffs": CoeffsConfig,
    "decay": DecayConfig,
    "gap-scan": GapScanConfig,
    "extremizers": ExtremizersConfig,
    "stolarsky": StolarskyConfig,
    "cap": CapConfig,
    "optimize": OptimizeConfig,
    "gen": GenConfig,
}


def _coerce(value, default):
    if isinstance(default, tuple) and isinstance(value, list):
        return tuple(value)
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"expected a boolean, got {value!r}")
        return value
    if isinstance(default, int) and not isinstance(default, bool):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"expected an integer, got {value!r}")
        return value
    if isinstance(default, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"expected a number, got {value!r}")
        return float(value)
    return value


def from_dict(cls, data):
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a JSON object")
    known = {f.name: f for f in fields(cls)}
    unknown = sorted(set(data) - set(known))
    if unknown:
        raise ConfigError(f"unknown configuration keys: {', '.join(unknown)}")
    kw = {}
    for k, v in data.items():
        default = cls.__dataclass_fields__[k].default
        try:
            kw[k] = _coerce(v, default)
        except ConfigError as exc:
            raise ConfigError(f"{k}: {exc}") from None
    cfg = cls(**kw)
    if hasattr(cfg, "validate"):
        cfg.validate()
    return cfg


def load(command, source=None):
    """Parse the JSON config for ``command`` from a path, '-' (stdin) or None (defaults)."""
    cls = SCHEMAS[command]
    if source is None:
        data = {}
    else:
        try:
            text = sys.stdin.read() if source == "-" else open(source).read()
            data = json.loads(text) if text.strip() else {}
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read configuration: {exc}") from exc
    return from_dict(cls, data)


def to_dict(cfg):
    return asdict(cfg)

