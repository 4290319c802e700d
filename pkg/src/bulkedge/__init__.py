"""Bulk and edge Hall conductance on finite lattice truncations.

Numerical verification suite for the equality of the bulk index of a pair
of projections and the boundary-current edge conductance in gapped magnetic
tight-binding models, together with the operator identities, regularised
traces, and Schatten-norm estimates underlying that equality.
"""

__version__ = "0.1.0"

from .errors import (
    AssumptionsViolated,
    BulkEdgeError,
    ConditionUnsatisfied,
    ConfigInvalid,
    DifferentP,
    DimensionMismatch,
    GapClosed,
    InsufficientGrid,
    InsufficientRange,
    IoFailure,
    NotAProjection,
    QuadratureUnresolved,
)
from .lattice import (
    EdgeTerm,
    GapReport,
    HermitianLatticeOperator,
    LatticeGeometry,
    LocalityReport,
    ModelSpec,
    build_bulk_hamiltonian,
    restrict_half_plane,
    spectral_gap,
    verify_locality,
)
from .switching import PhaseProfile, SwitchFunction
from .calculus import (
    CTReport,
    DecayProfile,
    SpectralDecomposition,
    combes_thomas_check,
    decay_profile,
    decompose,
    fermi_projection,
    hs_matrix_function,
    matrix_function,
)
from .gauge import (
    BoundReport,
    GaugePhase,
    flux_phase,
    phase_difference_bounds,
    pulled_phase,
    truncated_phase,
)
