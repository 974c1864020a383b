"""Partition qubit Hamiltonians into unitary fragments and build their measurement circuits."""

from .circuit import Circuit, Gate, measurement_circuit, unitary_group_circuit
from .cover import HEURISTICS, Partition, clique_cover, exact_cover_small, validate_partition
from .graph import Relation, RelationGraph, build_relation_graph, complement
from .hamiltonian import QubitHamiltonian, canonicalize, load_hamiltonian, parse_hamiltonian, serialize_hamiltonian
from .pauli import PauliWord, anticommutes, commutes, multiply, qubit_wise_commutes, weight
from .simulator import estimate_energy_exact, estimate_energy_sampled, expectation_direct, simulate
from .unitary import DECOMPOSITION_PHASE, UnitaryGroup, build_unitary_groups, reconstruct

__version__ = "0.1.0"
