"""Beam description, non-dimensionalization and uncoupled modal quantities.

All dimensionless quantities follow the scaling conventions of the purely
flexible Euler beam: abscissa by the beam length ``l``, time by the
characteristic time ``t0``, deflection by the radius of gyration ``r0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

# Handbook aluminium constants (not taken from any experiment in this package).
ALUMINIUM_E = 69e9  # Pa
ALUMINIUM_DENSITY = 2700.0  # kg/m^3


class DomainError(ValueError):
    """Raised when an input lies outside the domain of an operation."""


def _require_positive(**values: float) -> None:
    for name, value in values.items():
        if not (value > 0) or not math.isfinite(value):
            raise DomainError(f"{name} must be positive and finite, got {value!r}")


@dataclass(frozen=True)
class BeamSpec:
    """Physical description of a uniform Euler beam.

    lam    : mass per unit length [kg/m]
    l      : beam length [m]
    k_M    : bending stiffness E*I [N m^2]
    t0     : characteristic time [s]
    r0     : radius of gyration [m]; characteristic deflection length
    width, thickness : optional rectangular cross-section [m]
    """

    lam: float
    l: float
    k_M: float
    t0: float = 1.0
    r0: float = 1.0
    width: Optional[float] = None
    thickness: Optional[float] = None
    beta: float = field(init=False)

    def __post_init__(self):
        _require_positive(lam=self.lam, l=self.l, k_M=self.k_M, t0=self.t0, r0=self.r0)
        object.__setattr__(self, "beta", math.sqrt(self.lam * self.l**4 / (self.t0**2 * self.k_M)))

    @classmethod
    def rectangular(
        cls,
        length: float,
        width: float,
        thickness: float,
        E: float = ALUMINIUM_E,
        density: float = ALUMINIUM_DENSITY,
        t0: float = 1.0,
    ) -> "BeamSpec":
        """Build a spec from a solid rectangular section (defaults: aluminium)."""
        _require_positive(length=length, width=width, thickness=thickness, E=E, density=density)
        area = width * thickness
        inertia = width * thickness**3 / 12.0
        return cls(
            lam=density * area,
            l=length,
            k_M=E * inertia,
            t0=t0,
            r0=math.sqrt(inertia / area),
            width=width,
            thickness=thickness,
        )


def aluminium_beam(t0: float = 1.0) -> BeamSpec:
    """The 1 m x 3 cm x 2 mm aluminium beam used throughout the examples."""
    return BeamSpec.rectangular(1.0, 0.03, 0.002, t0=t0)


@dataclass(frozen=True)
class DimensionlessField:
    """Snapshot of the dimensionless beam fields at one abscissa and time."""

    zeta: float
    theta: float
    F_T: float
    F_M: float
    epsilon: float
    tau: float

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise DomainError(f"epsilon must lie in [0, 1], got {self.epsilon}")


def beta(spec: BeamSpec) -> float:
    """Return beta = sqrt(lam * l^4 / (t0^2 * k_M))."""
    return spec.beta


def beta_from(lam: float, l: float, k_M: float, t0: float) -> float:
    _require_positive(lam=lam, l=l, k_M=k_M, t0=t0)
    return math.sqrt(lam * l**4 / (t0**2 * k_M))


def modal_frequency(m: int, beta: float) -> float:
    """Dimensionless angular frequency (m pi)^2 / beta of simply supported mode m."""
    if int(m) != m or m < 1:
        raise DomainError(f"mode index must be an integer >= 1, got {m!r}")
    _require_positive(beta=beta)
    return (m * math.pi) ** 2 / beta


# Scale factor per physical quantity kind.
def _scales(spec: BeamSpec) -> dict:
    force = spec.k_M / spec.l**2
    return {
        "length": spec.l,
        "deflection": spec.r0,
        "time": spec.t0,
        "force": force,
        "moment": force * spec.l,
        "velocity": spec.r0 / spec.t0,
        "frequency": 1.0 / spec.t0,
    }


QUANTITIES = ("length", "deflection", "time", "force", "moment", "velocity", "frequency")


def nondimensionalize(value, quantity: str, spec: BeamSpec):
    """Map a physical value (scalar or array) of the given quantity kind to
    dimensionless form.

    ``quantity`` is one of ``QUANTITIES``: abscissae scale with ``l``,
    deflections with ``r0``, times with ``t0``; forces with ``k_M / l^2``.
    """
    try:
        scale = _scales(spec)[quantity]
    except KeyError:
        raise DomainError(f"unknown quantity {quantity!r}; expected one of {QUANTITIES}") from None
    return np.asarray(value) / scale if np.ndim(value) else value / scale


def dimensionalize(value, quantity: str, spec: BeamSpec):
    """Inverse of :func:`nondimensionalize`."""
    try:
        scale = _scales(spec)[quantity]
    except KeyError:
        raise DomainError(f"unknown quantity {quantity!r}; expected one of {QUANTITIES}") from None
    return np.asarray(value) * scale if np.ndim(value) else value * scale
