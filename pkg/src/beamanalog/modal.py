"""Sine-basis modal dynamics of the simply supported piezo-electromechanical beam.

For mode ``m`` the displacement coefficient ``u`` and the flux-linkage
coefficient ``psi`` (time integral of the voltage coefficient) obey the
gyroscopically coupled pair

    beta^2 u''   + (m pi)^4 u   - rho (m pi)^2 psi' = 0
    beta^2 psi'' + (m pi)^4 psi + rho (m pi)^2 u'   = 0

Different modes share no state, so each pair is integrated on its own.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Optional, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.linalg import expm
from scipy.optimize import minimize_scalar

from .beam_core import DomainError, _require_positive

MIN_STEPS_PER_PERIOD = 40
ENERGY_DRIFT_LIMIT = 1e-8
_RESOLVABLE_ENERGY = np.finfo(float).tiny / np.finfo(float).eps
CSV_HEADER = ("tau", "u", "udot", "psi", "psidot", "E_mech", "E_elec")


class StepSizeError(DomainError):
    def __init__(self, message: str, required_dt: float):
        super().__init__(message)
        self.required_dt = required_dt


@dataclass(frozen=True)
class ModalState:
    m: int
    u: float = 0.0
    udot: float = 0.0
    psi: float = 0.0
    psidot: float = 0.0

    def vector(self) -> np.ndarray:
        return np.array([self.u, self.udot, self.psi, self.psidot], dtype=float)

    @classmethod
    def from_vector(cls, m: int, x) -> "ModalState":
        return cls(m, *(float(v) for v in x))


@dataclass(frozen=True)
class ModeSystem:
    m: int
    beta: float
    rho: float

    @property
    def stiffness(self) -> float:
        return (self.m * math.pi) ** 4

    @property
    def gyroscopic(self) -> float:
        return self.rho * (self.m * math.pi) ** 2

    @property
    def omega(self) -> float:
        """Uncoupled angular frequency (m pi)^2 / beta."""
        return (self.m * math.pi) ** 2 / self.beta

    @property
    def splitting(self) -> float:
        """Difference of the two coupled frequencies, rho (m pi)^2 / beta^2."""
        return self.gyroscopic / self.beta**2

    def frequencies(self) -> tuple:
        """The two coupled angular frequencies (fast, slow), both positive."""
        g, w = self.splitting, self.omega
        root = math.sqrt(g * g / 4 + w * w)
        return root + g / 2, root - g / 2

    def matrix(self) -> np.ndarray:
        """First-order system matrix for the state (u, udot, psi, psidot)."""
        b2 = self.beta**2
        k, g = self.stiffness, self.gyroscopic
        return np.array(
            [
                [0.0, 1.0, 0.0, 0.0],
                [-k / b2, 0.0, 0.0, g / b2],
                [0.0, 0.0, 0.0, 1.0],
                [0.0, -g / b2, -k / b2, 0.0],
            ]
        )


def mode_ode(m: int, beta: float, rho: float) -> ModeSystem:
    if int(m) != m or m < 1:
        raise DomainError(f"mode index must be an integer >= 1, got {m!r}")
    _require_positive(beta=beta)
    if not rho >= 0:
        raise DomainError(f"rho must be non-negative, got {rho}")
    return ModeSystem(int(m), float(beta), float(rho))


def transfer_time(system: ModeSystem) -> float:
    """Time of complete mechanical-to-electrical transfer, pi beta^2 / (rho (m pi)^2)."""
    if system.rho == 0:
        return math.inf
    return math.pi / system.splitting


def exchange_period(system: ModeSystem) -> float:
    return 2.0 * transfer_time(system)


def energy_partition(state, system: ModeSystem) -> tuple:
    """(E_mech, E_elec) of a state; ``state`` may be a ModalState or an (..., 4) array."""
    x = state.vector() if isinstance(state, ModalState) else np.asarray(state, dtype=float)
    b2, k = system.beta**2, system.stiffness
    e_mech = 0.5 * b2 * x[..., 1] ** 2 + 0.5 * k * x[..., 0] ** 2
    e_elec = 0.5 * b2 * x[..., 3] ** 2 + 0.5 * k * x[..., 2] ** 2
    return e_mech, e_elec


@dataclass
class Trajectory:
    system: ModeSystem
    tau: np.ndarray
    states: np.ndarray  # (N, 4): u, udot, psi, psidot

    @property
    def u(self):
        return self.states[:, 0]

    @property
    def psi(self):
        return self.states[:, 2]

    @property
    def psidot(self):
        return self.states[:, 3]

    def energies(self) -> tuple:
        return energy_partition(self.states, self.system)

    @property
    def energy_drift(self) -> float:
        e_m, e_e = self.energies()
        total = e_m + e_e
        # below this, energies sit near the subnormal range and carry no relative precision
        if total[0] < _RESOLVABLE_ENERGY:
            return 0.0
        return float(np.max(np.abs(total - total[0])) / total[0])

    def final(self) -> ModalState:
        return ModalState.from_vector(self.system.m, self.states[-1])


def required_dt(system: ModeSystem) -> float:
    fast = system.frequencies()[0]
    return 2.0 * math.pi / fast / MIN_STEPS_PER_PERIOD


def integrate(system: ModeSystem, initial: ModalState, t_end: float, dt: float) -> Trajectory:
    """Integrate the mode pair from ``tau = 0`` to ``t_end`` with step ``dt``.

    Each step applies the exact propagator ``expm(A dt)`` of the linear
    system, which keeps the energy drift at round-off level.  A negative
    ``t_end`` (with negative ``dt``) integrates backwards in time.
    """
    if t_end == 0 or dt == 0 or math.copysign(1, t_end) != math.copysign(1, dt):
        raise DomainError("t_end and dt must be nonzero and of the same sign")
    limit = required_dt(system)
    if abs(dt) > limit * (1 + 1e-12):
        raise StepSizeError(
            f"dt={abs(dt):.6g} resolves fewer than {MIN_STEPS_PER_PERIOD} steps per period; use dt <= {limit:.6g}",
            limit,
        )
    A = system.matrix()
    n_full = int(math.floor(abs(t_end) / abs(dt) + 1e-9))
    remainder = t_end - n_full * dt
    times = [0.0]
    x = initial.vector()
    states = [x]
    P = expm(A * dt)
    for i in range(1, n_full + 1):
        x = P @ x
        states.append(x)
        times.append(i * dt)
    if abs(remainder) > 1e-12 * abs(dt):
        x = expm(A * remainder) @ x
        states.append(x)
        times.append(t_end)
    traj = Trajectory(system, np.array(times), np.array(states))
    drift = traj.energy_drift
    if drift > ENERGY_DRIFT_LIMIT:
        raise ArithmeticError(f"energy drift {drift:.3e} exceeds {ENERGY_DRIFT_LIMIT:g}")
    return traj


def beat_solution(system: ModeSystem, initial: ModalState, tau) -> np.ndarray:
    """Closed-form solution of the mode pair, states of shape (len(tau), 4).

    With z = u + i psi the pair reads z'' + i g z' + w^2 z = 0, whose
    solutions are superpositions of exp(i w_k tau) with w^2 + g w - w0^2 = 0.
    """
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    g, w0 = system.splitting, system.omega
    root = math.sqrt(g * g / 4 + w0 * w0)
    w1, w2 = -g / 2 + root, -g / 2 - root
    x = initial.vector()
    z0 = x[0] + 1j * x[2]
    zd0 = x[1] + 1j * x[3]
    # A + B = z0 ; i (w1 A + w2 B) = zd0
    B = (w1 * z0 + 1j * zd0) / (w1 - w2)
    A = z0 - B
    e1, e2 = np.exp(1j * w1 * tau), np.exp(1j * w2 * tau)
    z = A * e1 + B * e2
    zd = 1j * (w1 * A * e1 + w2 * B * e2)
    return np.column_stack([z.real, zd.real, z.imag, zd.imag])


def first_transfer_minimum(traj: Trajectory, threshold: float = 0.01) -> tuple:
    """First local minimum of E_mech lying below ``threshold * E_total``.

    The sampled minimum is refined by bounded scalar minimization using the
    exact propagator.  Returns (tau, E_mech / E_total) or (inf, nan).
    """
    e_m, e_e = traj.energies()
    total = e_m[0] + e_e[0]
    idx = None
    for i in range(1, len(e_m) - 1):
        if e_m[i] <= e_m[i - 1] and e_m[i] <= e_m[i + 1] and e_m[i] < threshold * total:
            idx = i
            break
    if idx is None:
        return math.inf, math.nan
    A = traj.system.matrix()
    x_left, t_left = traj.states[idx - 1], traj.tau[idx - 1]
    span = traj.tau[idx + 1] - t_left

    def e_at(s):
        return energy_partition(expm(A * s) @ x_left, traj.system)[0]

    res = minimize_scalar(e_at, bounds=(0.0, span), method="bounded", options={"xatol": 1e-12 * max(1.0, span)})
    return float(t_left + res.x), float(res.fun / total)


def unit_energy_state(m: int, energy: float = 1.0) -> ModalState:
    """Beam at rest in mode m holding ``energy`` as mechanical potential energy;
    electrical network discharged."""
    return ModalState(m, u=math.sqrt(2.0 * energy) / (m * math.pi) ** 2)


# -- projection ------------------------------------------------------------


@dataclass
class Projection:
    states: list
    coefficients: np.ndarray
    residual: float  # L2 norm of profile minus truncated sine series


def project_initial_conditions(profile: Callable[[float], float], n_modes: int, end_tol: float = 1e-6, points: Optional[Sequence[float]] = None) -> Projection:
    """Sine-series coefficients ``2 int_0^1 f(eps) sin(m pi eps) d eps``.

    ``points`` marks kinks of the profile for the quadrature.  The returned
    states carry the coefficients as displacements with zero velocity and
    zero flux linkage.
    """
    if n_modes < 1:
        raise DomainError("n_modes must be >= 1")
    for end in (0.0, 1.0):
        if abs(profile(end)) > end_tol:
            raise DomainError(f"profile violates simply supported kinematics at eps={end}: {profile(end):.3g}")
    kw = dict(limit=400, epsabs=1e-14, epsrel=1e-12)
    if points is not None:
        kw["points"] = list(points)
    coeffs = np.array(
        [2.0 * quad(lambda e, m=m: profile(e) * math.sin(m * math.pi * e), 0.0, 1.0, **kw)[0] for m in range(1, n_modes + 1)]
    )

    def recon(e):
        return sum(c * math.sin((i + 1) * math.pi * e) for i, c in enumerate(coeffs))

    residual = math.sqrt(quad(lambda e: (profile(e) - recon(e)) ** 2, 0.0, 1.0, **kw)[0])
    states = [ModalState(m, u=float(c)) for m, c in enumerate(coeffs, start=1)]
    return Projection(states, coeffs, residual)


def triangle_profile(peak: float = 0.5, amplitude: float = 1.0) -> Callable[[float], float]:
    if not 0.0 < peak < 1.0:
        raise DomainError("peak position must lie strictly inside (0, 1)")
    return lambda e: amplitude * (e / peak if e <= peak else (1.0 - e) / (1.0 - peak))


def mode_profile(m: int, amplitude: float = 1.0) -> Callable[[float], float]:
    return lambda e: amplitude * math.sin(m * math.pi * e)


# -- multi-mode runs -------------------------------------------------------


def simulate_modes(beta: float, rho: float, initial: Iterable[ModalState], t_end: float, dt: float) -> dict:
    """Integrate every initialized mode independently; returns {m: Trajectory}."""
    return {s.m: integrate(mode_ode(s.m, beta, rho), s, t_end, dt) for s in initial}


def spillover_check(run: Mapping[int, Trajectory]) -> float:
    """Largest change of any single mode's energy, relative to the total energy."""
    if len(run) < 2:
        raise DomainError("spill-over check needs at least two modes")
    total0 = sum(sum(e[0] for e in tr.energies()) for tr in run.values())
    if total0 < _RESOLVABLE_ENERGY:
        return 0.0
    leak = 0.0
    for tr in run.values():
        e_m, e_e = tr.energies()
        mode_total = e_m + e_e
        leak = max(leak, float(np.max(np.abs(mode_total - mode_total[0]))) / total0)
    return leak


def field_voltage_peak(run: Mapping[int, Trajectory], n_eps: int = 201) -> float:
    """Peak over time and abscissa of |sum_m psidot_m sin(m pi eps)|."""
    eps = np.linspace(0.0, 1.0, n_eps)
    lengths = {len(tr.tau) for tr in run.values()}
    if len(lengths) != 1:
        raise DomainError("trajectories must share the same time grid")
    field = sum(np.outer(tr.psidot, np.sin(m * math.pi * eps)) for m, tr in run.items())
    return float(np.max(np.abs(field)))


def trajectory_csv(traj: Trajectory) -> str:
    buf = io.StringIO()
    buf.write(",".join(CSV_HEADER) + "\n")
    e_m, e_e = traj.energies()
    for t, x, a, b in zip(traj.tau, traj.states, e_m, e_e):
        buf.write(",".join(f"{v:.11e}" for v in (t, *x, a, b)) + "\n")
    return buf.getvalue()


def read_trajectory_csv(text: str) -> np.ndarray:
    rows = list(csv.reader(io.StringIO(text)))
    if tuple(rows[0]) != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {rows[0]}")
    return np.array([[float(v) for v in row] for row in rows[1:]])
