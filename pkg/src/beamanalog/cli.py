"""Command line entry point: ``beamanalog synth|simulate|check``."""

from __future__ import annotations

import argparse
import dataclasses
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import modal
from .beam_core import DomainError, modal_frequency
from .config import ConfigError, ProjectConfig, load_config
from .mobility import PoleError, bandwidth_limit
from .piezo import actuator_port_voltage, characteristic_voltage, coupling_rho, lossless_check
from .synthesis import (
    assemble_line,
    export_netlist,
    feasibility_check,
    feasible_design,
    synthesize_module,
    write_netlist,
)

EXIT_OK, EXIT_VALIDATION, EXIT_RUNTIME = 0, 1, 2
NO_TRANSFER_LEVEL = 1e-12


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(text)


# -- synth -----------------------------------------------------------------


@dataclass
class SynthResult:
    netlist_text: str
    report_text: str
    feasible: bool


def cmd_synth(cfg: ProjectConfig, out: Optional[Path] = None) -> SynthResult:
    syn = cfg.synthesis
    delta = 1.0 / syn.n_modules if syn.n_modules >= 1 else math.nan
    if syn.n_modules < 2:
        raise DomainError(f"synthesis.n_modules: a line needs at least 2 modules, got {syn.n_modules}")
    module = synthesize_module(delta, cfg.beam, syn.kappa0, syn.kappainf, syn.C1)
    netlist = assemble_line(syn.n_modules, module)
    text = export_netlist(netlist)
    report = feasibility_check(module)
    best = feasible_design(delta, cfg.beam)
    lines = [
        f"modules      {syn.n_modules} (delta = {delta:.6g})",
        f"C1, C2       {module.C1:.6e} F, {module.C2:.6e} F",
        "L1..L4       " + ", ".join(f"{L:.6e} H" for L in module.inductances),
        f"zeta^2       {module.zeta_sq:.6e} s^2",
        *report.lines(),
        f"overall      {'PASS' if report.passed else 'FAIL'}",
        f"best design  C1={best.C1:.4e} F kappa0={best.kappa0:.4g} kappainf={best.kappainf:.4g} "
        f"worst log10 margin={best.margin:+.4f} ({'feasible' if best.feasible else 'no choice meets all bounds'})",
    ]
    report_text = "\n".join(lines) + "\n"
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        write_netlist(netlist, out / "netlist.cir")
        _write(out / "feasibility.txt", report_text)
    return SynthResult(text, report_text, report.passed)


# -- simulate --------------------------------------------------------------


@dataclass
class ModeSummary:
    m: int
    transfer_tau: float
    transfer_periods: float
    residual_fraction: float
    energy_drift: float
    transferred: bool


@dataclass
class SimulationResult:
    rho: float
    V0: float
    peak_voltage: float
    V_max: float
    modes: list
    csv: dict  # m -> text
    summary_text: str

    @property
    def voltage_ok(self) -> bool:
        return self.peak_voltage < self.V_max


def initial_states(cfg: ProjectConfig) -> list:
    """Modal initial data for the configured profile, at rest and discharged."""
    init = cfg.simulation.initial
    amplitude = init["amplitude_fraction"] * cfg.beam.l / cfg.beam.r0
    modes = cfg.simulation.modes
    if init["kind"] == "mode":
        shape = int(init.get("mode", 1))
        return [modal.ModalState(m, u=amplitude if m == shape else 0.0) for m in modes]
    peak = float(init.get("peak", 0.5))
    proj = modal.project_initial_conditions(modal.triangle_profile(peak, amplitude), max(modes), points=[peak])
    return [proj.states[m - 1] for m in modes]


def cmd_simulate(cfg: ProjectConfig, out: Optional[Path] = None) -> SimulationResult:
    beam, sim = cfg.beam, cfg.simulation
    rho = sim.rho if sim.rho is not None else coupling_rho(cfg.actuator, beam, cfg.neglect_layer_stiffness)
    kappa0 = cfg.synthesis.kappa0
    V0 = characteristic_voltage(cfg.actuator, beam, kappa0)
    states = initial_states(cfg)
    systems = {s.m: modal.mode_ode(s.m, beam.beta, rho) for s in states}
    lowest = systems[min(systems)]
    fastest = max(systems.values(), key=lambda s: s.frequencies()[0])
    t_end = sim.t_end
    if t_end is None:
        t_end = 12 * 2 * math.pi / lowest.omega
        if rho > 0:
            t_end = max(t_end, 1.5 * modal.transfer_time(lowest))
    dt = sim.dt if sim.dt is not None else modal.required_dt(fastest) / 2
    run = modal.simulate_modes(beam.beta, rho, states, t_end, dt)

    summaries = []
    csvs = {}
    for m, traj in run.items():
        e_m, e_e = traj.energies()
        total = e_m[0] + e_e[0]
        period = 2 * math.pi / traj.system.omega
        if total == 0:
            tau_star, frac, moved = math.inf, math.nan, False
        else:
            tau_star, frac = modal.first_transfer_minimum(traj)
            moved = bool(e_e.max() >= NO_TRANSFER_LEVEL * total) and math.isfinite(tau_star)
        summaries.append(ModeSummary(m, tau_star, tau_star / period, frac, traj.energy_drift, moved))
        csvs[m] = modal.trajectory_csv(traj)
    phi_peak = modal.field_voltage_peak(run)
    peak_voltage = abs(actuator_port_voltage(phi_peak, kappa0)) * V0

    lines = [
        f"beta         {beam.beta:.10e}",
        f"rho          {rho:.10e} (rho/beta = {rho / beam.beta:.6g})",
        f"V0           {V0:.6e} V",
        f"t_end, dt    {t_end:.6e}, {dt:.6e}",
    ]
    for s in summaries:
        if s.transferred:
            lines.append(
                f"mode {s.m}: transfer at tau={s.transfer_tau:.8e} = {s.transfer_periods:.6f} periods, "
                f"E_mech/E_total={s.residual_fraction:.3e}, drift={s.energy_drift:.3e}"
            )
        else:
            lines.append(f"mode {s.m}: no transfer, drift={s.energy_drift:.3e}")
    ok = peak_voltage < cfg.actuator.V_max
    lines.append(f"peak actuator voltage {peak_voltage:.6e} V (V_max {cfg.actuator.V_max:g} V): {'below' if ok else 'ABOVE'} limit")
    summary_text = "\n".join(lines) + "\n"
    if out is not None:
        for m, text in csvs.items():
            _write(out / f"mode_{m}.csv", text)
        _write(out / "summary.txt", summary_text)
    return SimulationResult(rho, V0, peak_voltage, cfg.actuator.V_max, summaries, csvs, summary_text)


# -- check -----------------------------------------------------------------


@dataclass
class CheckResult:
    omega_max: float
    highest_mode: int
    lossless: bool
    warnings: list
    report_text: str

    @property
    def passed(self) -> bool:
        return self.lossless


def cmd_check(cfg: ProjectConfig) -> CheckResult:
    n = cfg.synthesis.n_modules
    beta = cfg.beam.beta
    lines, warnings = [], []
    if n < 1:
        omega_max, highest = math.nan, 0
        warnings.append(f"synthesis.n_modules={n} leaves no element size to check")
    else:
        delta = 1.0 / n
        omega_max = bandwidth_limit(delta, beta)
        highest = 0
        while modal_frequency(highest + 1, beta) <= omega_max:
            highest += 1
        lines.append(f"bandwidth    delta={delta:.6g} beta={beta:.6g} omega_max={omega_max:.6e}")
        lines.append(f"highest mode {highest} ((m pi)^2/beta <= omega_max)")
        top = max(cfg.simulation.modes)
        if top > highest:
            warnings.append(f"simulation.modes: mode {top} exceeds the bandwidth of {n} modules (highest {highest})")
    loss = lossless_check(cfg.actuator)
    lines.append("lossless     " + ("PASS" if loss.passed else "FAIL: " + "; ".join(loss.violated)))
    if n < 2:
        warnings.append(f"synthesis.n_modules={n}: a line needs at least 2 modules")
    lines.extend(f"warning      {w}" for w in warnings)
    text = "\n".join(lines) + "\n"
    return CheckResult(omega_max, highest, loss.passed, warnings, text)


# -- entry point -----------------------------------------------------------


def _apply_overrides(cfg: ProjectConfig, args) -> ProjectConfig:
    sim = cfg.simulation
    if args.modes:
        try:
            modes = sorted({int(m) for m in args.modes.split(",")})
        except ValueError:
            raise ConfigError("--modes", f"expected comma-separated integers, got {args.modes!r}") from None
        if min(modes) < 1:
            raise ConfigError("--modes", "mode indices must be >= 1")
        sim = dataclasses.replace(sim, modes=modes)
    if args.rho is not None:
        if args.rho < 0:
            raise ConfigError("--rho", "must be non-negative")
        sim = dataclasses.replace(sim, rho=args.rho)
    out = Path(args.out) if args.out else cfg.output
    return dataclasses.replace(cfg, simulation=sim, output=out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="beamanalog", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("synth", "synthesize the analog line, write netlist and feasibility report"),
        ("simulate", "integrate the coupled modal equations, write CSV and summary"),
        ("check", "report bandwidth, highest controllable mode and actuator losslessness"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="YAML config (default: built-in aluminium example)")
        p.add_argument("--out", help="output directory (overrides config 'output')")
        p.add_argument("--modes", help="comma-separated mode indices, e.g. 1,2")
        p.add_argument("--rho", type=float, help="override the coupling parameter")
        if name == "synth":
            p.add_argument("--strict", action="store_true", help="exit 1 when a hardware bound fails")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _apply_overrides(load_config(args.config), args)
        if args.command == "synth":
            res = cmd_synth(cfg, cfg.output)
            sys.stdout.write(res.report_text)
            return EXIT_VALIDATION if args.strict and not res.feasible else EXIT_OK
        if args.command == "simulate":
            res = cmd_simulate(cfg, cfg.output)
            sys.stdout.write(res.summary_text)
            return EXIT_OK
        res = cmd_check(cfg)
        sys.stdout.write(res.report_text)
        return EXIT_OK if res.passed else EXIT_VALIDATION
    except (ConfigError, DomainError, NotImplementedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (PoleError, ArithmeticError, OSError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
