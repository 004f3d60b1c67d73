"""Bending piezoelectric actuator and the coupling constants of the
piezo-electromechanical beam."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .beam_core import BeamSpec, DomainError, _require_positive


@dataclass(frozen=True)
class ActuatorSpec:
    """Linear two-terminal bending actuator.

    Constitutive pair: M = K_mm chi + K_me V_p,  Q = K_em chi + K_ee V_p,
    with chi the relative attitude change across the actuator.

    K_mm : mechanical stiffness [N m / rad]
    K_me, K_em : cross coupling [C / rad] (lossless: K_em = -K_me)
    K_ee : capacitance [F]
    l_p  : actuator length [m]
    V_max: producer's maximum voltage [V]
    """

    K_mm: float
    K_me: float
    K_em: float
    K_ee: float
    l_p: float
    V_max: float = math.inf

    def constitutive(self, chi: float, V_p: float) -> tuple:
        """Return (bending moment, stored charge)."""
        return self.K_mm * chi + self.K_me * V_p, self.K_em * chi + self.K_ee * V_p


@dataclass(frozen=True)
class CouplingConstants:
    rho: float
    V0: float
    k_ee: float
    k_mm: float
    k_M_eff: float


@dataclass
class LosslessReport:
    passed: bool
    violated: list

    def __bool__(self) -> bool:
        return self.passed


def lossless_check(spec: ActuatorSpec, rtol: float = 1e-12) -> LosslessReport:
    """Check K_mm >= 0, K_ee >= 0 and K_em = -K_me."""
    violated = []
    if not spec.K_mm >= 0:
        violated.append("K_mm >= 0")
    if not spec.K_ee >= 0:
        violated.append("K_ee >= 0")
    scale = max(abs(spec.K_em), abs(spec.K_me))
    if abs(spec.K_em + spec.K_me) > rtol * scale:
        violated.append("K_em = -K_me")
    return LosslessReport(not violated, violated)


def capacitance_per_length(spec: ActuatorSpec) -> float:
    """k_ee = K_ee / l_p [F/m].  A zero result is legal but degenerate."""
    if not spec.l_p > 0:
        raise DomainError(f"actuator length l_p must be positive, got {spec.l_p}")
    return spec.K_ee / spec.l_p


def layer_stiffness(spec: ActuatorSpec) -> float:
    """Bending stiffness k_mm = K_mm * l_p of the piezo layer [N m^2]."""
    return spec.K_mm * spec.l_p


def effective_stiffness(spec: ActuatorSpec, beam: BeamSpec, neglect_layer: bool = True) -> float:
    return beam.k_M if neglect_layer else beam.k_M + layer_stiffness(spec)


def _k_ee_checked(spec: ActuatorSpec) -> float:
    k_ee = capacitance_per_length(spec)
    if not k_ee > 0:
        raise DomainError("capacitance per unit length must be positive for coupling constants")
    return k_ee


def coupling_rho(spec: ActuatorSpec, beam: BeamSpec, neglect_layer: bool = True) -> float:
    """Dimensionless coupling rho = K_em l^2 / (t0 k_M) * sqrt(lam / k_ee).

    The sign convention of K_em is absorbed: the returned value is |rho|.
    """
    k_ee = _k_ee_checked(spec)
    k_M = effective_stiffness(spec, beam, neglect_layer)
    return abs(spec.K_em) * beam.l**2 / (beam.t0 * k_M) * math.sqrt(beam.lam / k_ee)


def required_K_em(rho: float, spec: ActuatorSpec, beam: BeamSpec, neglect_layer: bool = True) -> float:
    """Magnitude of K_em giving the requested coupling ``rho``."""
    if rho < 0:
        raise DomainError(f"rho must be non-negative, got {rho}")
    k_ee = _k_ee_checked(spec)
    k_M = effective_stiffness(spec, beam, neglect_layer)
    return rho * beam.t0 * k_M / (beam.l**2 * math.sqrt(beam.lam / k_ee))


def characteristic_voltage(spec: ActuatorSpec, beam: BeamSpec, kappa0: float) -> float:
    """V0 = kappa0 r0 / (sqrt(2) t0) * sqrt(lam / k_ee) [V]."""
    _require_positive(kappa0=kappa0)
    k_ee = _k_ee_checked(spec)
    return kappa0 * beam.r0 / (math.sqrt(2.0) * beam.t0) * math.sqrt(beam.lam / k_ee)


def coupling_constants(spec: ActuatorSpec, beam: BeamSpec, kappa0: float, neglect_layer: bool = True) -> CouplingConstants:
    return CouplingConstants(
        rho=coupling_rho(spec, beam, neglect_layer),
        V0=characteristic_voltage(spec, beam, kappa0),
        k_ee=capacitance_per_length(spec),
        k_mm=layer_stiffness(spec),
        k_M_eff=effective_stiffness(spec, beam, neglect_layer=False),
    )


def effective_bending_moment(u_xx, V_p, spec: ActuatorSpec, beam: BeamSpec, neglect_layer: bool = True):
    """M = (k_mm + k_M) u'' + K_me V_p; k_mm is dropped when ``neglect_layer``."""
    return effective_stiffness(spec, beam, neglect_layer) * u_xx + spec.K_me * V_p


def actuator_port_voltage(phi, kappa0: float):
    """Dimensionless actuator voltage from the first-port voltage of a module."""
    return -math.sqrt(2.0) / kappa0 * phi


def representative_actuator(beam: BeamSpec, rho: Optional[float] = None) -> ActuatorSpec:
    """A generic PZT patch (K_ee = 100 nF, l_p = 0.1 m, V_max = 200 V).

    These are representative catalogue-level numbers, not measured data.  When
    ``rho`` is given, K_me/K_em are back-solved to produce it.
    """
    base = ActuatorSpec(K_mm=0.0, K_me=0.0, K_em=0.0, K_ee=100e-9, l_p=0.1, V_max=200.0)
    if rho is None:
        return base
    k = required_K_em(rho, base, beam)
    return ActuatorSpec(K_mm=0.0, K_me=k, K_em=-k, K_ee=base.K_ee, l_p=base.l_p, V_max=base.V_max)
