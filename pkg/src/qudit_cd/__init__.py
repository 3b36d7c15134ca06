"""Qudit statevector toolkit for symmetry-grouped counterdiabatic ansatze."""

from .algebra import (
    DenseCapError,
    StateVector,
    angular_momentum,
    evolve_exact,
    expectation,
    fidelity,
    native_gates,
    subspace_pauli,
)
from .ansatz import (
    Ansatz,
    action_alphas,
    bind_evolve,
    build_cd_ansatz,
    build_dcqaoa,
    build_qaoa,
    exact_propagate,
    initial_state,
    trotter_evolve,
)
from .cd import CDCoefficients, CDPool, CoefficientPath, action_minimize, cd_coefficients, cd_pool, commutator_expand
from .experiment import ExperimentConfig, load_config, metrics_and_emit, run_experiment, solve
from .graph import Graph, GraphFormatError, decode_graph6, encode_graph6, parse_graph
from .hamiltonians import (
    Schedule,
    adiabatic,
    dicke_hamiltonian,
    exact_ground,
    ising_zz,
    maxkcut_coefficients,
    maxkcut_hamiltonian,
    mixer,
    w_state,
)
from .optimizer import OptimizerConfig, RunRecord, minimize, multistart
from .symmetry import OrbitPartition, ParamGroupMap, automorphism_group, group_parameters, orbit_partition
from .terms import TermSum

__version__ = "0.1.0"
