"""Membership-function families: Gaussian, generalized bell, triangular, trapezoidal.

Every family is an immutable value holding its parameters. ``evaluate`` and
``parameter_gradient`` accept scalars or arrays; ``with_params`` is the only
way training changes a function, and it projects the raw parameter vector
back onto the valid domain (width floors, sorted feet).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import ClassVar

import numpy as np

from .errors import ConfigurationError, ParameterDomainError

#: Lower bound for widths / slopes after every update.
PARAM_FLOOR = 1e-9

_HALF_MAX = 2.0 * math.sqrt(2.0 * math.log(2.0))


def _as_input(x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ParameterDomainError(f"membership input must be finite, got {x!r}")
    return arr


def _scalar_or_array(values: np.ndarray, like: np.ndarray):
    return float(values) if like.ndim == 0 else values


class MembershipFunction:
    """Interface shared by the four families.

    Subclasses are frozen dataclasses whose fields, in declaration order,
    are the trainable parameters.
    """

    kind: ClassVar[str] = ""
    param_names: ClassVar[tuple[str, ...]] = ()

    @property
    def params(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in self.param_names], dtype=float)

    @property
    def n_params(self) -> int:
        return len(self.param_names)

    def with_params(self, values) -> MembershipFunction:
        """Return a copy built from ``values`` after projecting onto the valid domain."""
        values = np.asarray(values, dtype=float)
        if values.shape != (self.n_params,):
            raise ParameterDomainError(
                f"{self.kind} expects {self.n_params} parameters, got shape {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise ParameterDomainError(f"non-finite {self.kind} parameters {values.tolist()}")
        return type(self)(*(float(v) for v in self._project(values)))

    def _project(self, values: np.ndarray) -> np.ndarray:
        return values

    def kinks(self) -> tuple[float, ...]:
        """Inputs at which the function is not differentiable."""
        return ()

    def evaluate(self, x):
        raise NotImplementedError

    def parameter_gradient(self, x):
        raise NotImplementedError

    def __call__(self, x):
        return self.evaluate(x)

    def to_dict(self) -> dict:
        return {"type": self.kind, "params": [float(v) for v in self.params]}


def _check_finite(mf: MembershipFunction) -> None:
    for name in mf.param_names:
        value = getattr(mf, name)
        if not math.isfinite(value):
            raise ParameterDomainError(f"{mf.kind}.{name} must be finite, got {value!r}")


def _check_positive(mf: MembershipFunction, *names: str) -> None:
    for name in names:
        value = getattr(mf, name)
        if value < PARAM_FLOOR:
            raise ParameterDomainError(f"{mf.kind}.{name} must be >= {PARAM_FLOOR}, got {value!r}")


@dataclass(frozen=True)
class Gaussian(MembershipFunction):
    """exp(-(x - center)^2 / (2 sigma^2))."""

    center: float
    sigma: float

    kind: ClassVar[str] = "gaussian"
    param_names: ClassVar[tuple[str, ...]] = ("center", "sigma")

    def __post_init__(self):
        _check_finite(self)
        _check_positive(self, "sigma")

    @classmethod
    def for_grid(cls, center: float, spacing: float) -> Gaussian:
        # neighbours cross at exactly 0.5
        return cls(center, spacing / _HALF_MAX)

    def _project(self, values):
        return np.array([values[0], max(values[1], PARAM_FLOOR)])

    def evaluate(self, x):
        x = _as_input(x)
        return _scalar_or_array(np.exp(-((x - self.center) ** 2) / (2.0 * self.sigma**2)), x)

    def parameter_gradient(self, x):
        x = _as_input(x)
        diff = x - self.center
        mu = np.exp(-(diff**2) / (2.0 * self.sigma**2))
        d_center = mu * diff / self.sigma**2
        d_sigma = mu * diff**2 / self.sigma**3
        return np.stack([d_center, d_sigma], axis=-1)


@dataclass(frozen=True)
class GeneralizedBell(MembershipFunction):
    """1 / (1 + |(x - center) / width|^(2 slope))."""

    width: float
    slope: float
    center: float

    kind: ClassVar[str] = "gbell"
    param_names: ClassVar[tuple[str, ...]] = ("width", "slope", "center")

    def __post_init__(self):
        _check_finite(self)
        _check_positive(self, "width", "slope")

    @classmethod
    def for_grid(cls, center: float, spacing: float) -> GeneralizedBell:
        return cls(spacing / 2.0, 2.0, center)

    def _project(self, values):
        return np.array([max(values[0], PARAM_FLOOR), max(values[1], PARAM_FLOOR), values[2]])

    def evaluate(self, x):
        x = _as_input(x)
        t = np.abs((x - self.center) / self.width)
        return _scalar_or_array(1.0 / (1.0 + t ** (2.0 * self.slope)), x)

    def parameter_gradient(self, x):
        x = _as_input(x)
        t = (x - self.center) / self.width
        abs_t = np.abs(t)
        u = abs_t ** (2.0 * self.slope)
        mu = 1.0 / (1.0 + u)
        mu2 = mu * mu
        nonzero = abs_t > 0
        safe_t = np.where(nonzero, t, 1.0)
        log_t = np.log(np.where(nonzero, abs_t, 1.0))
        d_width = 2.0 * self.slope * u * mu2 / self.width
        d_slope = np.where(nonzero, -2.0 * u * log_t * mu2, 0.0)
        # |t|^(2b-1) sign(t) == u / t away from the centre
        d_center = np.where(nonzero, 2.0 * self.slope * mu2 * (u / safe_t) / self.width, 0.0)
        return np.stack([d_width, d_slope, d_center], axis=-1)


@dataclass(frozen=True)
class Triangular(MembershipFunction):
    left: float
    peak: float
    right: float

    kind: ClassVar[str] = "triangular"
    param_names: ClassVar[tuple[str, ...]] = ("left", "peak", "right")

    def __post_init__(self):
        _check_finite(self)
        if not self.left <= self.peak <= self.right:
            raise ParameterDomainError(
                f"triangular needs left <= peak <= right, got {self.left}, {self.peak}, {self.right}"
            )

    @classmethod
    def for_grid(cls, center: float, spacing: float) -> Triangular:
        return cls(center - spacing, center, center + spacing)

    def _project(self, values):
        return np.sort(values)

    def kinks(self):
        return (self.left, self.peak, self.right)

    def evaluate(self, x):
        x = _as_input(x)
        l, p, r = self.left, self.peak, self.right
        mu = np.zeros_like(x)
        rise = (x > l) & (x < p)
        fall = (x > p) & (x < r)
        mu = np.where(rise, (x - l) / (p - l if p > l else 1.0), mu)
        mu = np.where(fall, (r - x) / (r - p if r > p else 1.0), mu)
        mu = np.where(x == p, 1.0, mu)
        return _scalar_or_array(mu, x)

    def parameter_gradient(self, x):
        x = _as_input(x)
        l, p, r = self.left, self.peak, self.right
        grad = np.zeros(x.shape + (3,))
        rise = (x > l) & (x < p)
        fall = (x > p) & (x < r)
        if p > l:
            width2 = (p - l) ** 2
            grad[..., 0] = np.where(rise, (x - p) / width2, 0.0)
            grad[..., 1] = np.where(rise, -(x - l) / width2, 0.0)
        if r > p:
            width2 = (r - p) ** 2
            grad[..., 1] += np.where(fall, (r - x) / width2, 0.0)
            grad[..., 2] = np.where(fall, (x - p) / width2, 0.0)
        return grad


@dataclass(frozen=True)
class Trapezoidal(MembershipFunction):
    left_foot: float
    left_shoulder: float
    right_shoulder: float
    right_foot: float

    kind: ClassVar[str] = "trapezoidal"
    param_names: ClassVar[tuple[str, ...]] = (
        "left_foot",
        "left_shoulder",
        "right_shoulder",
        "right_foot",
    )

    def __post_init__(self):
        _check_finite(self)
        if not self.left_foot <= self.left_shoulder <= self.right_shoulder <= self.right_foot:
            raise ParameterDomainError(f"trapezoidal corners out of order: {self.params.tolist()}")

    @classmethod
    def for_grid(cls, center: float, spacing: float) -> Trapezoidal:
        return cls(center - spacing, center - spacing / 4.0, center + spacing / 4.0, center + spacing)

    def _project(self, values):
        return np.sort(values)

    def kinks(self):
        return tuple(self.params)

    def evaluate(self, x):
        x = _as_input(x)
        a, b, c, d = self.params
        mu = np.where((x >= b) & (x <= c), 1.0, 0.0)
        mu = np.where((x > a) & (x < b), (x - a) / (b - a if b > a else 1.0), mu)
        mu = np.where((x > c) & (x < d), (d - x) / (d - c if d > c else 1.0), mu)
        return _scalar_or_array(mu, x)

    def parameter_gradient(self, x):
        x = _as_input(x)
        a, b, c, d = self.params
        grad = np.zeros(x.shape + (4,))
        rise = (x > a) & (x < b)
        fall = (x > c) & (x < d)
        if b > a:
            width2 = (b - a) ** 2
            grad[..., 0] = np.where(rise, (x - b) / width2, 0.0)
            grad[..., 1] = np.where(rise, -(x - a) / width2, 0.0)
        if d > c:
            width2 = (d - c) ** 2
            grad[..., 2] = np.where(fall, (d - x) / width2, 0.0)
            grad[..., 3] = np.where(fall, (x - c) / width2, 0.0)
        return grad


FAMILIES: dict[str, type[MembershipFunction]] = {
    cls.kind: cls for cls in (Gaussian, GeneralizedBell, Triangular, Trapezoidal)
}

_ALIASES = {
    "gauss": "gaussian",
    "gaussmf": "gaussian",
    "bell": "gbell",
    "gbellmf": "gbell",
    "generalized_bell": "gbell",
    "generalized-bell": "gbell",
    "tri": "triangular",
    "trimf": "triangular",
    "trap": "trapezoidal",
    "trapmf": "trapezoidal",
}


def resolve_family(name: str) -> type[MembershipFunction]:
    """Look up a family by name (case-insensitive, MATLAB-style aliases accepted)."""
    key = str(name).strip().lower()
    key = _ALIASES.get(key, key)
    try:
        return FAMILIES[key]
    except KeyError:
        raise ConfigurationError(
            f"unknown membership function type {name!r}; choose from {sorted(FAMILIES)}"
        ) from None


def from_dict(spec: dict) -> MembershipFunction:
    family = resolve_family(spec["type"])
    params = [float(v) for v in spec["params"]]
    if len(params) != len(family.param_names):
        raise ParameterDomainError(f"{family.kind} expects {len(family.param_names)} parameters")
    return family(*params)


def evaluate(mf: MembershipFunction, x):
    """Membership degree of ``x`` in ``mf``, in [0, 1]."""
    return mf.evaluate(x)


def parameter_gradient(mf: MembershipFunction, x):
    """Partial derivatives of the degree w.r.t. each parameter (last axis).

    Kinks of the piecewise-linear families get a zero subgradient.
    """
    return mf.parameter_gradient(x)
