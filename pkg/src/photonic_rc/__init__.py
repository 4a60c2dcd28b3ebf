"""Steady-state simulator of a photonic reservoir computer with Boolean readout."""
from .encoder import (BooleanImage, EncoderGeometry, compose_input, encode_digit,
                      illumination_profile, input_image, make_dc_ring)
from .config import ExperimentConfig, load_config, parse_config
from .errors import ConfigError, DegenerateBatch, NonConvergence
from .harness import ResultsBundle, run_experiment, sweep
from .optics import TransferMatrix, inject, sample_fiber_matrix, sample_injection_matrix
from .oracles import exhaustive_oracle, ridge_oracle
from .pipeline import ReservoirComputer
from .readout import Normalizer, calibrate, normalize, raw_output, threshold_classify
from .reservoir import (ReservoirParams, ReservoirState, build_internal_coupling, build_layout,
                        detect_powers, steady_state)
from .tasks import Metrics, TaskSpec, evaluate, generate_test_batch, generate_train_batch, target
from .trainer import TrainerConfig, TrainingTrace, fit_exponential_decay, mse, train

__version__ = "0.1.0"
