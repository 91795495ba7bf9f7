"""Quantum linear network coding: parity-tableau simulation, compilers and oracles."""

from .circuit import Op, QlncCircuit, execute, quantum_depth, validate
from .compiler import (
    check_independence,
    compile_chain_sequential,
    compile_constant_depth,
    compile_inorder,
    depth_bound,
)
from .network import LinearCode, Network
from .tableau import OutcomeSource, ParityTableau, new_tableau
from .verify import enumerate_branches, verify_circuit, walk_branches

__all__ = [
    "LinearCode",
    "Network",
    "Op",
    "OutcomeSource",
    "ParityTableau",
    "QlncCircuit",
    "check_independence",
    "compile_chain_sequential",
    "compile_constant_depth",
    "compile_inorder",
    "depth_bound",
    "enumerate_branches",
    "execute",
    "new_tableau",
    "quantum_depth",
    "validate",
    "verify_circuit",
    "walk_branches",
]

__version__ = "0.1.0"
