"""Semi-classical simulations of the photon-box thought experiment.

Monte Carlo estimates of energy and emission-time spreads for the weighing
protocols, Schwarzschild time dilation along the box trajectory, the slab
shutter, the Mandelstam-Tamm orthogonalization bound and the weight of a
trapped photon.
"""

from .core import (
    BoxConfig,
    PhysicalConstants,
    UncertaintySpec,
    derive_box_config,
    hup_bound,
    validate_constants,
)
from .experiments import (
    ProtocolResult,
    ShutterConfig,
    reference_arrival_times,
    run_shutter,
    run_version1,
    run_version2,
    run_version3,
)
from .mandelstam_tamm import MTProblem, mandelstam_tamm_check
from .phase_space import Ensemble, PhaseSample, angle_uncertainty, evolve, propagate_uncertainty, sample_ensemble
from .relativity import (
    PhotonBounce,
    Trajectory,
    coordinate_time,
    delta_t_version1,
    delta_t_version2,
    dt_dtau,
    photon_mean_force,
    redshifted_momentum,
    schwarzschild_phi,
)

__version__ = "0.1.0"
