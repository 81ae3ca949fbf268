"""Simulation and analysis of continuous-variable teleportation of Gaussian states."""

from .errors import (
    CVTeleError,
    InconsistentMeasurement,
    InvalidArgument,
    UnphysicalParameter,
    UnphysicalState,
    UnsupportedOperation,
)
from .fidelity import (
    FidelityReport,
    SqueezedThermalParams,
    classical_fidelity_sweep,
    extract_params,
    fidelity_gaussian,
    fidelity_squeezed_thermal,
    fidelity_vacuum,
)
from .gaussian import (
    GaussianState,
    QuadPair,
    SymplecticTransform,
    apply_symplectic,
    displace,
    from_db,
    homodyne_condition,
    loss_channel,
    make_symplectic,
    squeezed_thermal_state,
    to_db,
    vacuum_state,
    visibility_correct,
    wigner_value,
)
from .montecarlo import ShotRecord, estimate_gain, estimate_variances, run_shots, sample_state
from .teleport import (
    TeleportConfig,
    check_variance_ordering,
    duan_sum,
    make_epr,
    teleport_network,
    teleport_variances_analytic,
)

__version__ = "0.1.0"
