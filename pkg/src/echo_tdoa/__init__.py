"""Ultrasound TDoA positioning with unsynchronised chirp-train acquisition."""

from ._core import BACKEND
from .channel import AcquisitionConfig, AttenuationModel, attenuation_gain, simulate_reception, snr_at
from .detection import ToaEstimate, circular_xcorr, detect_toa, parabolic_refine
from .experiment import ExperimentConfig, GridResult, Mode, empirical_cdf, grid_sweep, run_trial
from .geometry import Anchor, Point3, Scene, anchor_range, incidence_angle, true_range_diff
from .signal import ChirpSpec, SampledSignal, chirp_train_value, chirp_value, synthesize_template
from .solver import PositionFix, residual, solve_iterative, solve_linear_array
from .tdoa import CorrectionConfig, RangeDiffSet, correct_range_difference, form_corrected_set, raw_range_diff

__version__ = "0.1.0"
