"""Minimum-time bounds and entanglement dynamics for bipartite pure states."""

from .brachistochrone import best_rate_p, composition_time, sweep_p, verify_composition
from .dynamics import (
    EntanglementLevel,
    ExactState,
    Trajectory,
    evolve,
    hitting_time,
    rotating_frame,
    sample_trajectory,
)
from .errors import InputError, NumericalError
from .geometry import (
    BoundReport,
    bound_time,
    fs_metric_schmidt,
    fs_speed,
    min_time_bound,
    path_length,
    two_qubit_bound_curve,
)
from .hamiltonian import (
    CanonicalTwoQubit,
    NonlocalHamiltonian,
    TwoQubitCoefficients,
    assemble,
    canonicalize,
    correlation,
    expectation,
    from_canonical,
    from_pauli,
    mix,
    speed_decomposition,
    uncertainty,
)
from .rates import (
    entangling_capability,
    entanglement_rate,
    rate_bound,
    rotating_speed,
    time_avg_rate,
    two_qubit_rate_identity,
)
from .state import (
    BipartiteState,
    SchmidtForm,
    bell_psi_plus,
    entropy,
    geodesic_distance,
    overlap,
    product_state,
    schmidt,
    two_qubit_state,
)

__version__ = "0.1.0"
