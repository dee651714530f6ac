"""Quantum-circuit MPS simulator with VarQITE optimization."""

from ._qcmps import (
    AnsatzSpec,
    GuardExceeded,
    NumericalFailure,
    ParseError,
    PauliSum,
    __version__,
    block_unitary,
    build_number_operator,
    dense_matrix,
    exact_diagonalize,
    expectation,
    hadamard_test_expectation,
    parse_hamiltonian,
    parse_hamiltonian_file,
    random_params,
    run_varqite,
    serialize_hamiltonian,
    synthesize_tc,
)

__all__ = [
    "AnsatzSpec",
    "GuardExceeded",
    "NumericalFailure",
    "ParseError",
    "PauliSum",
    "__version__",
    "block_unitary",
    "build_number_operator",
    "dense_matrix",
    "exact_diagonalize",
    "expectation",
    "hadamard_test_expectation",
    "parse_hamiltonian",
    "parse_hamiltonian_file",
    "random_params",
    "run_varqite",
    "serialize_hamiltonian",
    "synthesize_tc",
]
