"""Covariance violation of smeared Unruh-DeWitt detectors in flat spacetime."""

from .detector import (SIGMA_Z, DetectorConfig, PointlikeSmearingError, QubitState, SmearingKind,
                       commutator_with_sigma_z, monopole_commutator_kernel, smearing,
                       spacetime_smearing, switching)
from .field import VACUUM, FieldKind, FieldState, interval_sq_detector_frame, wightman_spacelike
from .geometry import (LAB, FrameSpec, IntervalClass, InvalidFrameError, SpacetimeEvent,
                       boost_delta_t, classify_interval, gamma, in_s_leq)
from .numerics import NonConvergenceError, QuadratureSpec, expint_ei
from .violation import (DeviationMatrix, ViolationPath, ViolationResult, config_from_triple,
                        multi_detector_deviation, pointlike_trace_e, single_detector_deviation,
                        trace_e, trace_e_dimensionless, trace_e_ei_2d, trace_e_reduced3d,
                        trace_e_reference_mc)

__version__ = "0.1.0"
