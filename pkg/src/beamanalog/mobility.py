"""Mobility matrix of a free-free Euler beam element and its Foster truncation.

Port ordering is fixed as ``(v1, w1, v2, w2)`` for velocities (translation and
rotation at the left and right terminal) against ``(F_T1, F_M1, F_T2, F_M2)``
for the contact actions exerted *on* the element.  Terminal 1 sits at
``epsilon = 0`` and terminal 2 at ``epsilon = delta``.

The boundary-value problem is solved in the Krylov-Duncan basis

    phi_r(eps) = eps^r * sum_j (a^4 eps^4)^j / (4j + r)!,     r = 0..3,

which is entire in ``a^4 = -beta^2 eta^2``.  The rigid-body singularity of the
free element then appears as an explicit ``1 / a^4`` factor, so the matrix can
be evaluated accurately arbitrarily close to ``eta = 0``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .beam_core import DomainError, _require_positive

# First nonzero root of cosh(x) cos(x) = 1, as quoted for the bandwidth bound.
FREE_FREE_ROOT = 4.73004
POLE_TOLERANCE = 1e-9
SUPPORTED_ORDERS = (0, 1, None)

_SERIES_RADIUS = 6.0


class PoleError(ArithmeticError):
    """The requested Laplace point coincides with a pole of the mobility."""

    def __init__(self, message: str, pole: complex):
        super().__init__(message)
        self.pole = pole


def wavenumber(eta: complex) -> complex:
    """Complex wavenumber k = sqrt(eta) * exp(j pi / 4), principal branch."""
    return cmath.sqrt(complex(eta)) * cmath.exp(0.25j * math.pi)


def krylov_coefficients(w: complex) -> np.ndarray:
    """Return ``c_r(w) = sum_j w^j / (4j + r)!`` for r = 0..3."""
    w = complex(w)
    x = w**0.25
    if abs(x) <= _SERIES_RADIUS:
        out = np.zeros(4, dtype=complex)
        for r in range(4):
            term = 1.0 / math.factorial(r)
            total = term
            j = 0
            while abs(term) > 1e-18 * max(abs(total), 1e-300):
                j += 1
                term = term * w / ((4 * j + r) * (4 * j + r - 1) * (4 * j + r - 2) * (4 * j + r - 3))
                total += term
                if j > 200:
                    break
            out[r] = total
        return out
    ch, c = cmath.cosh(x), cmath.cos(x)
    sh, s = cmath.sinh(x), cmath.sin(x)
    return np.array([(ch + c) / 2, (sh + s) / (2 * x), (ch - c) / (2 * x**2), (sh - s) / (2 * x**3)])


def normalized_denominator(delta: float, eta: complex, beta: float) -> complex:
    """``6 (1 - cosh(x) cos(x)) / x^4`` with ``x = sqrt(beta) k delta``.

    Equals 1 at ``eta = 0`` and vanishes exactly at the elastic poles of the
    element mobility.
    """
    w = -((beta * eta) ** 2) * delta**4
    c = krylov_coefficients(w)
    return 12.0 * (c[2] ** 2 - c[1] * c[3])


@lru_cache(maxsize=None)
def free_free_roots(count: int) -> tuple:
    """First ``count`` positive roots of cosh(x) cos(x) = 1."""
    f = lambda x: math.cos(x) - 1.0 / math.cosh(x)
    return tuple(
        brentq(f, (r + 0.5) * math.pi - 0.5, (r + 0.5) * math.pi + 0.5, xtol=1e-15)
        for r in range(1, count + 1)
    )


def nearest_pole(delta: float, eta: complex, beta: float) -> complex:
    """Elastic pole ``j x_r^2 / (beta delta^2)`` closest to ``eta``."""
    roots = free_free_roots(64)
    target = math.sqrt(abs(beta * eta)) * delta
    x_r = min(roots, key=lambda r: abs(r - target))
    sign = -1.0 if complex(eta).imag < 0 else 1.0
    return 1j * sign * x_r**2 / (beta * delta**2)


@dataclass(frozen=True)
class MobilityMatrix:
    delta: float
    eta: complex
    k: complex
    entries: np.ndarray

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)


def _flexibility(delta: float, a4: complex) -> np.ndarray:
    """Displacement response (zeta, theta at both ends) per unit contact action."""
    c = krylov_coefficients(a4 * delta**4)
    p0, p1, p2, p3 = c[0], c[1] * delta, c[2] * delta**2, c[3] * delta**3
    Q = np.array([[p2, p3], [p1, p2]])
    G = np.empty((4, 4), dtype=complex)
    for col in range(4):
        f1, m1, f2, m2 = np.eye(4)[col]
        C3, C2 = f1, -m1
        rhs = np.array([m2 - C2 * p0 - C3 * p1, -f2 - C2 * a4 * p3 - C3 * p0])
        reduced = np.linalg.solve(Q, rhs)  # = a4 * (C0, C1)
        C0, C1 = reduced / a4
        G[:, col] = (
            C0,
            C1,
            C0 * p0 + C1 * p1 + C2 * p2 + C3 * p3,
            reduced[0] * p3 + C1 * p0 + C2 * p1 + C3 * p2,
        )
    return G


def exact_mobility(delta: float, eta: complex, beta: float) -> MobilityMatrix:
    """Exact 4x4 mobility of a free-free element of dimensionless size ``delta``.

    Raises :class:`PoleError` at ``eta = 0`` (rigid-body pole) or when the
    normalized denominator falls below ``POLE_TOLERANCE``.
    """
    _require_positive(delta=delta, beta=beta)
    eta = complex(eta)
    if eta == 0:
        raise PoleError("eta = 0 is the rigid-body pole of a free element", 0j)
    q = normalized_denominator(delta, eta, beta)
    if abs(q) < POLE_TOLERANCE:
        pole = nearest_pole(delta, eta, beta)
        raise PoleError(f"eta = {eta} lies on the elastic pole {pole}", pole)
    a4 = -((beta * eta) ** 2)
    G = _flexibility(delta, a4)
    M = eta * G
    M = 0.5 * (M + M.T)  # symmetric by reciprocity; removes round-off asymmetry
    return MobilityMatrix(delta, eta, wavenumber(eta), M)


def bandwidth_limit(delta: float, beta: float) -> float:
    """Largest dimensionless angular frequency an element of size delta represents."""
    _require_positive(delta=delta, beta=beta)
    return FREE_FREE_ROOT**2 / (delta**2 * beta)


# Linearized eigenvector patterns of the two residues (rows) and the leading
# order eigenvalue weights attached to them.
def pole_zero_rows(delta: float) -> np.ndarray:
    return np.array([[1.0, 0.0, 1.0, 0.0], [-delta / 2, 1.0, delta / 2, 1.0]])


def pole_infinity_rows(delta: float, order: Optional[int] = 1) -> np.ndarray:
    d = delta if order != 0 else 0.0
    return np.array(
        [
            [d / 6, -1.0, d / 6, 1.0],
            [1.0, d / 6, 1.0, -d / 6],
            [-3 * d / 34, 1.0, 3 * d / 34, 1.0],
            [1.0, 3 * d / 34, -1.0, 3 * d / 34],
        ]
    )


def pole_zero_weights(delta: float, beta: float) -> np.ndarray:
    """Inverse mass and inverse centroidal inertia of the rigid element."""
    return np.array([1.0 / (beta**2 * delta), 12.0 / (beta**2 * delta**3)])


def pole_infinity_weights(delta: float) -> np.ndarray:
    return np.array([delta / 4, delta**3 / 720, 17 * delta / 140, delta**3 / 4080])


def exact_inertia_relief_flexibility(delta: float) -> np.ndarray:
    """Coefficient of eta in the Laurent expansion of the mobility (exact)."""
    d = delta
    return np.array(
        [
            [d**3 / 105, -11 * d**2 / 210, d**3 / 140, 13 * d**2 / 420],
            [-11 * d**2 / 210, 13 * d / 35, -13 * d**2 / 420, -9 * d / 70],
            [d**3 / 140, -13 * d**2 / 420, d**3 / 105, 11 * d**2 / 210],
            [13 * d**2 / 420, -9 * d / 70, 11 * d**2 / 210, 13 * d / 35],
        ]
    )


@dataclass(frozen=True)
class FosterForm:
    """Two-pole Foster representation ``M(eta) ~ K0 / eta + eta * Kinf``."""

    K0: np.ndarray
    Kinf: np.ndarray
    delta: float
    truncation_order: Optional[int]
    eig0: tuple = field(init=False, repr=False)
    eiginf: tuple = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "eig0", np.linalg.eigh(self.K0))
        object.__setattr__(self, "eiginf", np.linalg.eigh(self.Kinf))

    def __call__(self, eta: complex) -> np.ndarray:
        eta = complex(eta)
        return self.K0 / eta + eta * self.Kinf


def foster_residues(delta: float, beta: float, truncation_order: Optional[int] = 1) -> FosterForm:
    """Residue matrices of the poles at eta = 0 and eta = infinity.

    ``truncation_order=None`` returns the exact Laurent coefficients.  Order 1
    rebuilds the pole-at-infinity residue from eigenvectors linearized in delta
    with leading-order eigenvalues; order 0 also drops the O(delta) terms of
    the eigenvectors.  The pole at zero is exact at every order since its
    eigenvectors are exactly affine in delta.
    """
    _require_positive(delta=delta, beta=beta)
    if truncation_order not in SUPPORTED_ORDERS:
        raise DomainError(f"truncation_order must be one of {SUPPORTED_ORDERS}, got {truncation_order!r}")
    B = pole_zero_rows(delta)
    K0 = B.T @ np.diag(pole_zero_weights(delta, beta)) @ B
    if truncation_order is None:
        Kinf = exact_inertia_relief_flexibility(delta)
    else:
        R = pole_infinity_rows(delta, truncation_order)
        Kinf = R.T @ np.diag(pole_infinity_weights(delta)) @ R
    return FosterForm(K0, Kinf, delta, truncation_order)


def foster_error(delta: float, beta: float, omegas, truncation_order: Optional[int] = 1) -> float:
    """Largest relative Frobenius error of the Foster form along eta = j omega."""
    form = foster_residues(delta, beta, truncation_order)
    worst = 0.0
    for omega in np.atleast_1d(omegas):
        eta = 1j * float(omega)
        M = exact_mobility(delta, eta, beta).entries
        worst = max(worst, np.linalg.norm(M - form(eta)) / np.linalg.norm(M))
    return worst
