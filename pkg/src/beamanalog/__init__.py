"""Electrical analog of a vibrating Euler beam coupled to distributed
piezoelectric actuators: element mobility, Foster synthesis, netlist export
and modal energy-transfer simulation."""

from .beam_core import BeamSpec, DimensionlessField, DomainError, aluminium_beam, beta, modal_frequency
from .mobility import FosterForm, MobilityMatrix, PoleError, bandwidth_limit, exact_mobility, foster_residues, wavenumber
from .synthesis import CircuitModule, Netlist, TurnsRatioPair, assemble_line, export_netlist, synthesize_module
from .piezo import ActuatorSpec, CouplingConstants, coupling_rho
from .modal import ModalState, ModeSystem, integrate, mode_ode

__version__ = "0.1.0"
