"""Photonic Klein tunneling through an evanescent slab with spontaneous-emission sources."""

from .constants import CODATA, Constants
from .emission import DipoleEmitter, EdgeShape, edge_data_from_physical, gamma0, gamma_medium
from .matching import (
    MatchingSystem,
    NearSingularError,
    assemble,
    assemble_arrays,
    measured,
    scatter,
    solve,
)
from .model import (
    EdgeData,
    EmissionScenario,
    Family,
    MeasuredProbabilities,
    ScatteringSolution,
    SlabSystem,
    SourceProfile,
    Variant,
    profile_eval,
    validate_system,
)
from .nonlinear import (
    BackgroundField,
    NonlinearSources,
    nonlinear_sources,
    observability_estimate,
    zeta_constant,
)
from .oracles import (
    DegenerateCaseError,
    barrier_transmission,
    case1_closed,
    case2_closed,
    case3_closed,
    case4_closed,
    sum_rule,
)

__version__ = "0.1.0"
