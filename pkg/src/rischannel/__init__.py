"""Physics-compliant channel matrices for RIS-parametrized radio environments,
with reduced-basis and low-rank update paths for fast realization sweeps."""

from .errors import (
    CollisionError,
    CombinedUpdateError,
    ConditioningError,
    ConditioningWarning,
    DiagonalizationError,
    DomainError,
    ResonanceError,
    RisChannelError,
    ScenarioError,
    SingularGeometryError,
    UpdateSingularityError,
)
from .interaction import InteractionMatrix, assemble, block, set_ris_diagonal
from .oracle import ChannelMatrix, channel_full, compare_channels
from .physics import DipoleParams, green_function, inverse_polarizability, wavenumber
from .reduction import (
    EigenBasis,
    EigenPrecompute,
    ReducedSystem,
    channel_from_reduced,
    eigen_precompute,
    reduce,
    shifted_reduce,
)
from .scenario import (
    IndexMap,
    RisConfiguration,
    RisElement,
    Scenario,
    build_index_map,
    configuration_to_inverse_polarizabilities,
    demo_scenario,
    dump_scenario,
    load_scenario,
    uniform_scenario,
    validate,
)
from .specfun import bessel_j0, bessel_y0, hankel0_first_kind
from .updates import (
    DisplacementDelta,
    OneBitEngine,
    RisDelta,
    TrajectoryCache,
    combined_update,
    displace_full,
    displace_multi_reduced,
    displace_reduced,
    displacement_delta,
    one_bit_plan,
    precompute_with_trajectories,
    trajectory_cache,
    woodbury_full,
    woodbury_reduced_channel,
)

__version__ = "0.1.0"
