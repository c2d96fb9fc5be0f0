"""Stability certificates for discrete-time systems with interval time-varying delay."""
from .assembly import BLOCKDIAG, FULL, DelaySystem, LKFVariables, assemble, assemble_pi, assemble_rcc
from .feasibility import StabilityCertificate, check, pose, solve, verify_certificate
from .frontier import DelayBoundResult, max_delay, table_sweep
from .simulation import DelaySequence, Trajectory, augmented_state, delta_v_chain_check, lkf_value, simulate

__all__ = [
    "BLOCKDIAG", "FULL", "DelaySystem", "LKFVariables", "assemble", "assemble_pi", "assemble_rcc",
    "StabilityCertificate", "check", "pose", "solve", "verify_certificate",
    "DelayBoundResult", "max_delay", "table_sweep",
    "DelaySequence", "Trajectory", "augmented_state", "delta_v_chain_check", "lkf_value", "simulate",
]
__version__ = "0.1.0"
