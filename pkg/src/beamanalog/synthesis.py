"""Passive four-port circuit module analog to a beam element, and the line
obtained by cascading such modules.

Each module is the series connection of two ideal multi-winding transformers
sharing the four ports:

* the pole-at-zero network, two windings terminated by capacitors C1, C2;
* the pole-at-infinity network, four windings terminated by inductors L1..L4.

Port voltages are ``T^T v_w`` and winding currents ``T i_p`` for a turns-ratio
matrix ``T`` with one row per terminating winding.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import eigh, null_space
from scipy.optimize import linprog

from .beam_core import BeamSpec, DomainError, _require_positive
from .mobility import pole_infinity_rows, pole_zero_rows

L_MAX = 10e-3  # H, strict
C_MAX = 100e-9  # F
TURNS_RANGE = (0.1, 10.0)


@dataclass(frozen=True)
class TurnsRatioPair:
    T0: np.ndarray
    Tinf: np.ndarray
    kappa0: float
    kappainf: float


@dataclass(frozen=True)
class CircuitModule:
    """Component values of one cell.  ``t0`` and ``beta`` are carried along so
    that the cell impedance can be brought back to dimensionless form."""

    C1: float
    C2: float
    L1: float
    L2: float
    L3: float
    L4: float
    turns: TurnsRatioPair
    zeta_sq: float
    delta: float
    t0: float
    beta: float

    @property
    def capacitances(self) -> np.ndarray:
        return np.array([self.C1, self.C2])

    @property
    def inductances(self) -> np.ndarray:
        return np.array([self.L1, self.L2, self.L3, self.L4])

    @property
    def impedance_scale(self) -> float:
        """Reference impedance [ohm] mapping the cell onto the dimensionless mobility."""
        return self.turns.kappa0**2 * self.t0 * self.beta**2 * self.delta / (2.0 * self.C1)

    def elastance_matrix(self) -> np.ndarray:
        """Port-side inverse capacitance matrix T0^T C^-1 T0 [1/F]."""
        T0 = self.turns.T0
        return T0.T @ np.diag(1.0 / self.capacitances) @ T0

    def inductance_matrix(self) -> np.ndarray:
        """Port-side inductance matrix Tinf^T L Tinf [H]."""
        Ti = self.turns.Tinf
        return Ti.T @ np.diag(self.inductances) @ Ti

    def impedance(self, s: complex) -> np.ndarray:
        """Physical 4x4 port impedance at Laplace variable ``s`` [1/s]."""
        return self.elastance_matrix() / s + s * self.inductance_matrix()

    def dimensionless_impedance(self, eta: complex) -> np.ndarray:
        return self.impedance(complex(eta) / self.t0) / self.impedance_scale


def turns_ratio_matrices(delta: float, kappa0: float, kappainf: float) -> TurnsRatioPair:
    """Turns-ratio matrices linearized in delta (2x4 and 4x4)."""
    _require_positive(delta=delta, kappa0=kappa0, kappainf=kappainf)
    T0 = kappa0 / math.sqrt(2.0) * pole_zero_rows(delta)
    Tinf = kappainf / math.sqrt(2.0) * pole_infinity_rows(delta, 1)
    return TurnsRatioPair(T0, Tinf, float(kappa0), float(kappainf))


def zeta_squared(delta: float, spec: BeamSpec, kappa0: float, kappainf: float) -> float:
    """Scale constant (kappa0/kappainf)^2 (lam/k_M) (delta l)^4 [s^2]."""
    return (kappa0 / kappainf) ** 2 * (spec.lam / spec.k_M) * (delta * spec.l) ** 4


def component_values(delta: float, spec: BeamSpec, kappa0: float, kappainf: float, C1: float) -> CircuitModule:
    _require_positive(delta=delta, kappa0=kappa0, kappainf=kappainf, C1=C1)
    zsq = zeta_squared(delta, spec, kappa0, kappainf)
    C2 = C1 * delta**2 / 12.0
    return CircuitModule(
        C1=C1,
        C2=C2,
        L1=zsq / (48.0 * C2),
        L2=zsq / (720.0 * C1),
        L3=17.0 * zsq / (1680.0 * C2),
        L4=zsq / (4080.0 * C1),
        turns=turns_ratio_matrices(delta, kappa0, kappainf),
        zeta_sq=zsq,
        delta=delta,
        t0=spec.t0,
        beta=spec.beta,
    )


def synthesize_module(delta: float, spec: BeamSpec, kappa0: float = math.sqrt(2), kappainf: float = math.sqrt(2), C1: float = 100e-9) -> CircuitModule:
    """Bundle turns ratios and component values into one cell."""
    return component_values(delta, spec, kappa0, kappainf, C1)


# -- feasibility -----------------------------------------------------------


@dataclass
class ConstraintResult:
    passed: bool
    bound: str
    violations: list = field(default_factory=list)


@dataclass
class FeasibilityReport:
    inductance: ConstraintResult
    capacitance: ConstraintResult
    turns_ratio: ConstraintResult

    @property
    def passed(self) -> bool:
        return self.inductance.passed and self.capacitance.passed and self.turns_ratio.passed

    def lines(self) -> list:
        out = []
        for name in ("inductance", "capacitance", "turns_ratio"):
            res = getattr(self, name)
            status = "PASS" if res.passed else "FAIL"
            detail = ", ".join(f"{k}={v:.4g}" for k, v in res.violations)
            out.append(f"{name:12s} {status}  ({res.bound})" + (f"  violating: {detail}" if detail else ""))
        return out


def _turns_entries(turns: TurnsRatioPair):
    for label, T in (("T0", turns.T0), ("Tinf", turns.Tinf)):
        for (i, j), value in np.ndenumerate(T):
            if value != 0.0:
                yield f"{label}[{i},{j}]", abs(value)


def feasibility_check(module: CircuitModule) -> FeasibilityReport:
    """Check component values against L < 10 mH, C <= 100 nF and nonzero
    turns-ratio magnitudes within [0.1, 10]."""
    L_bad = [(f"L{i + 1}", L) for i, L in enumerate(module.inductances) if not L < L_MAX]
    C_bad = [(f"C{i + 1}", C) for i, C in enumerate(module.capacitances) if not C <= C_MAX]
    lo, hi = TURNS_RANGE
    T_bad = [(name, v) for name, v in _turns_entries(module.turns) if not lo <= v <= hi]
    return FeasibilityReport(
        ConstraintResult(not L_bad, "L < 10 mH", L_bad),
        ConstraintResult(not C_bad, "C <= 100 nF", C_bad),
        ConstraintResult(not T_bad, "0.1 <= |T_ij| <= 10", T_bad),
    )


@dataclass
class DesignSearch:
    C1: float
    kappa0: float
    kappainf: float
    margin: float  # smallest log10 margin over all bounds; >= 0 means feasible
    module: CircuitModule

    @property
    def feasible(self) -> bool:
        return self.margin > 0


def feasible_design(delta: float, spec: BeamSpec, small_entries: bool = True) -> DesignSearch:
    """Choose (C1, kappa0, kappainf) maximizing the worst log-margin to the
    hardware bounds.

    Every component value and turns ratio is a monomial in the three design
    variables, so the max-min margin problem is a linear program in their
    logarithms; a negative optimum proves that no choice satisfies all bounds.
    ``small_entries=False`` ignores the O(delta) turns-ratio entries.
    """
    _require_positive(delta=delta)
    lg = math.log10
    # columns: log C1, log kappa0, log kappainf, t (margin); rows: a.x + b >= t
    lam_k = lg(spec.lam / spec.k_M) + 4 * lg(delta * spec.l)
    rows = []
    # log zeta^2 = 2 log k0 - 2 log kinf + lam_k ; log C2 = log C1 + 2 log delta - log 12
    c2 = 2 * lg(delta) - lg(12)
    for coeff, via_c2 in ((48.0, True), (720.0, False), (1680.0 / 17.0, True), (4080.0, False)):
        # log L = lam_k + 2k0 - 2kinf - log coeff - log C (C = C2 or C1)
        shift = lam_k - lg(coeff) - (c2 if via_c2 else 0.0)
        rows.append(([1.0, -2.0, 2.0], lg(L_MAX) - shift))
    rows.append(([-1.0, 0.0, 0.0], lg(C_MAX)))
    rows.append(([-1.0, 0.0, 0.0], lg(C_MAX) - c2))
    pattern = {1.0}
    small0 = {delta / 2} if small_entries else set()
    smallinf = {delta / 6, 3 * delta / 34} if small_entries else set()
    for col, mags in ((1, pattern | small0), (2, pattern | smallinf)):
        for mag in mags:
            base = lg(mag / math.sqrt(2))
            a_up = [0.0, 0.0, 0.0]
            a_up[col] = -1.0
            rows.append((a_up, lg(TURNS_RANGE[1]) - base))
            a_lo = [0.0, 0.0, 0.0]
            a_lo[col] = 1.0
            rows.append((a_lo, base - lg(TURNS_RANGE[0])))
    # a.x + b >= t  <=>  -a.x + t <= b
    A_ub = [[-a[0], -a[1], -a[2], 1.0] for a, _ in rows]
    b_ub = [b for _, b in rows]
    res = linprog(
        c=[0, 0, 0, -1.0],
        A_ub=A_ub,
        b_ub=b_ub,
        bounds=[(-15, 0), (-6, 6), (-6, 6), (None, None)],
        method="highs",
    )
    if not res.success:
        raise RuntimeError(f"design search failed: {res.message}")
    lc1, lk0, lkinf, t = res.x
    C1, k0, kinf = 10**lc1, 10**lk0, 10**lkinf
    return DesignSearch(C1, k0, kinf, float(t), component_values(delta, spec, k0, kinf, C1))


# -- line assembly ---------------------------------------------------------


class Boundary(str, enum.Enum):
    SIMPLY_SUPPORTED = "SIMPLY_SUPPORTED"
    FREE = "FREE"
    CLAMPED = "CLAMPED"


class Termination(str, enum.Enum):
    SHORT = "SHORT"
    OPEN = "OPEN"


@dataclass
class Netlist:
    """Cascade of identical-topology modules.

    Joint ``j`` (0..n) carries an upper node ``j{j}_v`` (translational-velocity
    analog, the port the actuator voltage is taken across) and a lower node
    ``j{j}_w`` (rotational-velocity analog).  Module ``m`` (1..n) connects the
    joints ``m-1`` and ``m``; all port return terminals are the ground ``0``.
    """

    modules: list
    boundary: tuple
    terminations: dict  # node -> Termination

    @property
    def n(self) -> int:
        return len(self.modules)

    def joint_nodes(self, j: int) -> tuple:
        return f"j{j}_v", f"j{j}_w"

    def port_nodes(self, m: int) -> tuple:
        """Port (+) nodes of module m (1-based) in (v1, w1, v2, w2) order."""
        return self.joint_nodes(m - 1) + self.joint_nodes(m)

    @property
    def nodes(self) -> list:
        out = ["0"]
        for j in range(self.n + 1):
            out.extend(self.joint_nodes(j))
        for m in range(1, self.n + 1):
            out.extend(f"m{m}_s{p}" for p in range(1, 5))
            out.extend(f"m{m}_c{i}" for i in range(1, 3))
            out.extend(f"m{m}_l{i}" for i in range(1, 5))
        return out


_EDGE_TERMINATIONS = {
    Boundary.SIMPLY_SUPPORTED: (Termination.SHORT, Termination.OPEN),
}


def assemble_line(n: int, module: CircuitModule, boundary=(Boundary.SIMPLY_SUPPORTED, Boundary.SIMPLY_SUPPORTED)) -> Netlist:
    """Cascade ``n`` copies of ``module`` and terminate the edge ports."""
    if int(n) != n or n < 2:
        raise DomainError(f"a line needs at least 2 modules, got n={n!r}")
    if isinstance(boundary, (str, Boundary)):
        boundary = (boundary, boundary)
    left, right = (Boundary(b) for b in boundary)
    terminations = {}
    for side, j in ((left, 0), (right, n)):
        if side not in _EDGE_TERMINATIONS:
            raise NotImplementedError(f"{side.value} boundary is not implemented; only SIMPLY_SUPPORTED is")
        upper, lower = _EDGE_TERMINATIONS[side]
        v, w = f"j{j}_v", f"j{j}_w"
        terminations[v] = upper
        terminations[w] = lower
    return Netlist([module] * int(n), (left, right), terminations)


def _kcl_constraints(netlist: Netlist) -> np.ndarray:
    """Rows of sum-of-port-charges = 0 at every joint node not tied to ground."""
    n = netlist.n
    rows = []
    for j in range(n + 1):
        for k, node in enumerate(netlist.joint_nodes(j)):
            if netlist.terminations.get(node) == Termination.SHORT:
                continue
            row = np.zeros(4 * n)
            if j > 0:
                row[4 * (j - 1) + 2 + k] = 1.0
            if j < n:
                row[4 * j + k] = 1.0
            rows.append(row)
    return np.array(rows)


def line_frequencies(netlist: Netlist, count: Optional[int] = None) -> np.ndarray:
    """Natural angular frequencies [rad/s] of the terminated LC line, ascending.

    The port charges of every module are the generalized coordinates: the
    inductors store (1/2) qdot^T L q̇ and the capacitors (1/2) q^T S q; joint
    KCL constraints are eliminated through a null-space basis.
    """
    n = netlist.n
    S = np.zeros((4 * n, 4 * n))
    L = np.zeros((4 * n, 4 * n))
    for m, module in enumerate(netlist.modules):
        sl = slice(4 * m, 4 * m + 4)
        S[sl, sl] = module.elastance_matrix()
        L[sl, sl] = module.inductance_matrix()
    N = null_space(_kcl_constraints(netlist))
    w2 = eigh(N.T @ S @ N, N.T @ L @ N, eigvals_only=True)
    w = np.sqrt(np.clip(w2, 0.0, None))
    return w if count is None else w[:count]


# -- netlist text ----------------------------------------------------------


def _fmt(x: float) -> str:
    return f"{x:.11e}"


def _winding(pairs) -> str:
    return ",".join(f"{a}:{b}" for a, b in pairs)


def _rows(T: np.ndarray) -> str:
    return ";".join(",".join(_fmt(v) for v in row) for row in T)


def export_netlist(netlist: Netlist) -> str:
    """Render the line as deterministic ASCII text (LF line endings).

    Element lines are ``C|L <id> <node+> <node-> <value>`` and
    ``K <id> P=<port windings> S=<load windings> N=<ratio rows>`` where each
    winding is ``node+:node-`` and ``N`` has one row per load winding.
    """
    if netlist.n < 2:
        raise DomainError("netlist must contain at least 2 modules")
    out = [f"* beam-analog line n={netlist.n} boundary={netlist.boundary[0].value},{netlist.boundary[1].value}"]
    for m, mod in enumerate(netlist.modules, start=1):
        out.append(
            f".MODULE {m} delta={_fmt(mod.delta)} t0={_fmt(mod.t0)} beta={_fmt(mod.beta)} "
            f"kappa0={_fmt(mod.turns.kappa0)} kappainf={_fmt(mod.turns.kappainf)} zeta_sq={_fmt(mod.zeta_sq)}"
        )
        for i, C in enumerate(mod.capacitances, start=1):
            out.append(f"C C{i}_{m} m{m}_c{i} 0 {_fmt(C)}")
        for i, L in enumerate(mod.inductances, start=1):
            out.append(f"L L{i}_{m} m{m}_l{i} 0 {_fmt(L)}")
        ports = netlist.port_nodes(m)
        series = [f"m{m}_s{p}" for p in range(1, 5)]
        out.append(
            f"K T0_{m} P={_winding(zip(ports, series))} "
            f"S={_winding((f'm{m}_c{i}', '0') for i in (1, 2))} N={_rows(mod.turns.T0)}"
        )
        out.append(
            f"K Tinf_{m} P={_winding((s, '0') for s in series)} "
            f"S={_winding((f'm{m}_l{i}', '0') for i in range(1, 5))} N={_rows(mod.turns.Tinf)}"
        )
    for node in sorted(netlist.terminations, key=netlist.nodes.index):
        out.append(f".{netlist.terminations[node].value} {node}")
    out.append(".END")
    return "\n".join(out) + "\n"


def write_netlist(netlist: Netlist, path) -> None:
    try:
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(export_netlist(netlist))
    except OSError as exc:
        raise OSError(f"cannot write netlist to {path}: {exc}") from exc


_KV = re.compile(r"(\w+)=(\S+)")


class NetlistParseError(ValueError):
    pass


def parse_netlist(text: str) -> Netlist:
    """Inverse of :func:`export_netlist`."""
    modules = []
    terminations = {}
    boundary = None
    current = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        head, *rest = line.split()
        try:
            if head == "*":
                kv = dict(_KV.findall(line))
                if "boundary" in kv:
                    boundary = tuple(Boundary(b) for b in kv["boundary"].split(","))
            elif head == ".MODULE":
                if current is not None:
                    modules.append(_finish_module(current))
                current = {k: float(v) for k, v in _KV.findall(line)}
            elif head in ("C", "L"):
                name, _, _, value = rest
                current[name.split("_")[0]] = float(value)
            elif head == "K":
                name = rest[0].split("_")[0]
                kv = dict(_KV.findall(line))
                current[name] = np.array([[float(v) for v in row.split(",")] for row in kv["N"].split(";")])
            elif head in (".SHORT", ".OPEN"):
                terminations[rest[0]] = Termination(head[1:])
            elif head == ".END":
                break
            else:
                raise NetlistParseError(f"line {lineno}: unknown record {head!r}")
        except (KeyError, ValueError, TypeError) as exc:
            if isinstance(exc, NetlistParseError):
                raise
            raise NetlistParseError(f"line {lineno}: {exc}") from exc
    if current is not None:
        modules.append(_finish_module(current))
    if boundary is None:
        raise NetlistParseError("missing boundary header")
    return Netlist(modules, boundary, terminations)


def _finish_module(d: dict) -> CircuitModule:
    return CircuitModule(
        C1=d["C1"],
        C2=d["C2"],
        L1=d["L1"],
        L2=d["L2"],
        L3=d["L3"],
        L4=d["L4"],
        turns=TurnsRatioPair(d["T0"], d["Tinf"], d["kappa0"], d["kappainf"]),
        zeta_sq=d["zeta_sq"],
        delta=d["delta"],
        t0=d["t0"],
        beta=d["beta"],
    )
