"""Open quantum walks that run quantum circuits as dissipative chain dynamics.

The package compiles a unitary circuit into a chain walk whose forward hops
apply the next gate, iterates the walk to its steady state, and reports how
the detection probability at the output register and the number of steps to
stationarity depend on the forward weight ω.  A dense master-equation
integrator provides an independent continuous-time cross-check.
"""

from . import circuits, lindblad, linalg, walk
from ._kernels import USING_NUMBA
from .circuits import (
    BUILTIN_CIRCUITS,
    Circuit,
    Gate,
    circuit_product,
    circuit_unitaries,
    dft_matrix,
    parse_circuit,
    qft,
    render_circuit,
    toffoli13,
    toffoli_matrix,
)
from .config import TOL, Tolerances
from .errors import (
    CapacityError,
    CircuitError,
    CircuitParseError,
    DomainError,
    ShapeError,
)
from .lindblad import LindbladModel, build_dqc_lindblad, integrate, lindblad_rhs
from .walk import (
    BathParams,
    BlockState,
    ChainParams,
    ConvergenceReport,
    OpenQuantumWalk,
    analytic_chain_steady,
    bath_to_rates,
    build_dqc_chain,
    classical_marginal_step,
    conditional_state,
    run_until_converged,
    step,
    two_node_gate_walk,
    validate,
)

__version__ = "0.1.0"
