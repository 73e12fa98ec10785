"""Cascaded two-system quantum dynamics with wave-packet transformation.

Subpackages by concern:

* hilbert    -- dense operator algebra on small Hilbert spaces
* cascade    -- Lindblad generators and master-equation integration
* trajectory -- Monte-Carlo wave-function unraveling
* wavepacket -- envelopes, the reversing transformation, time maps
* transfer   -- single-excitation state-transfer experiment
* cli        -- config-driven experiments with CSV/SVG artifacts
"""

from .cascade import (
    CascadeModel,
    IntegrationAbort,
    MasterRun,
    TwoClockState,
    build_h0,
    build_h_eff,
    build_h_ex,
    build_jump_operator,
    integrate_master,
    lindblad_rhs,
)
from .trajectory import TrajectoryConfig, ensemble_average, evolve_trajectory
from .transfer import (
    TransferResult,
    check_time_reversed_envelope,
    drive_system2,
    emit_envelope,
    transfer_experiment,
)
from .wavepacket import (
    Envelope,
    PhaseSchedule,
    PhaseTag,
    Spectrum,
    TransformSpec,
    apply_u_frequency_domain,
    apply_u_time_domain,
    derive_transform_params,
    phase_schedule,
    time_map,
    time_map_inverse,
)

__version__ = "0.1.0"
