"""End-to-end reservoir computer: digit -> pattern -> injection -> steady state -> powers."""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import rng as rngs
from .encoder import EncoderGeometry, illumination_profile, input_image, make_dc_ring
from .errors import ConfigError
from .io import load_matrix
from .optics import inject, sample_fiber_matrix, sample_injection_matrix
from .readout import calibrate, normalize, raw_output
from .reservoir import (ReservoirParams, build_internal_coupling, build_layout,
                        check_locking, noisy_powers, steady_state)
from .tasks import LabeledBatch, TaskSpec, generate_train_batch
from .trainer import mse


@dataclass(frozen=True)
class OpticsConfig:
    modes: int = 36
    fiber_path: Optional[str] = None  # pinned matrix sidecar files override seeded sampling
    imaging_path: Optional[str] = None


def _load_pinned(path):
    try:
        return load_matrix(path)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot load transfer matrix {path}: {exc}") from None


class ReservoirComputer:
    """Fixed (untrained) part of the network for one seeded realization.

    Steady states depend only on the digit, so they are solved once and
    cached; detection noise is applied per evaluation.
    """

    def __init__(self, geometry: EncoderGeometry, params: ReservoirParams, optics: OpticsConfig = OpticsConfig(),
                 fiber_seed: int = 0, imaging_seed: int = 1):
        self.geometry = geometry
        self.params = params
        self.optics = optics
        self.illumination = illumination_profile(geometry)
        if optics.fiber_path:
            self.fiber = _load_pinned(optics.fiber_path)
        else:
            self.fiber = sample_fiber_matrix(fiber_seed, optics.modes, geometry.n_pixels)
        if optics.imaging_path:
            self.imaging = _load_pinned(optics.imaging_path)
        else:
            self.imaging = sample_injection_matrix(imaging_seed, params.n_nodes, optics.modes)
        if self.fiber.cols != geometry.n_pixels or self.imaging.shape != (params.n_nodes, self.fiber.rows):
            raise ConfigError(f"matrix shapes {self.fiber.shape}, {self.imaging.shape} do not chain "
                              f"{geometry.n_pixels} pixels to {params.n_nodes} nodes")
        self.layout = build_layout(params.n_nodes)
        self.coupling = build_internal_coupling(self.layout, params)
        self._states = {}

    @property
    def n_nodes(self) -> int:
        return self.params.n_nodes

    @property
    def n_digits(self) -> int:
        return 2**self.geometry.n_bits

    def injection(self, d: int) -> np.ndarray:
        return inject(input_image(d, self.geometry), self.illumination, self.fiber, self.imaging)

    def dc_injection(self) -> np.ndarray:
        return inject(make_dc_ring(self.geometry), self.illumination, self.fiber, self.imaging)

    def state(self, d: int):
        if d not in self._states:
            self._states[d] = steady_state(self.injection(d), self.params, self.coupling)
        return self._states[d]

    def clean_powers(self, d: int) -> np.ndarray:
        return self.state(d).P

    def response_matrix(self) -> np.ndarray:
        """Noiseless powers, one row per digit."""
        return np.array([self.clean_powers(d) for d in range(self.n_digits)])

    def detect(self, P, gen: np.random.Generator) -> np.ndarray:
        return noisy_powers(P, self.params.noise_sigma, gen)

    def check_locking(self, seed: int = 0, starts: int = 5) -> float:
        """Start-independence of the steady state for the ring and every digit."""
        worst = check_locking(self.dc_injection(), self.params, self.coupling,
                              rngs.stream(seed, rngs.LOCK_CHECK), starts)
        for d in range(self.n_digits):
            worst = max(worst, check_locking(self.injection(d), self.params, self.coupling,
                                             rngs.stream(seed, rngs.LOCK_CHECK, d + 1), starts))
        return worst


class BatchEvaluator:
    """Training-batch error of a weight vector, as the trainer expects.

    Noise for epoch ``k`` comes from stream ``(noise_seed, TRAIN_NOISE, k)``
    with one row per sample; in frozen mode every epoch reuses one draw.
    Outputs and targets are both standardized over the batch before the
    mean squared error is taken.
    """

    def __init__(self, pipeline: ReservoirComputer, spec: TaskSpec, batch: LabeledBatch,
                 noise_seed: int = 0, frozen_noise: bool = False, resample_seed=None):
        self.pipeline = pipeline
        self.spec = spec
        self.batch = batch
        self.noise_seed = noise_seed
        self.frozen_noise = frozen_noise
        self.resample_seed = resample_seed
        self._clean = np.array([pipeline.clean_powers(int(d)) for d in batch.digits])
        self._target_norm = calibrate(batch.targets)

    def batch_for(self, epoch: int) -> LabeledBatch:
        if self.resample_seed is None or epoch == 0:
            return self.batch
        return generate_train_batch(self.spec, len(self.batch), self.resample_seed, epoch)

    def powers(self, epoch: int, batch: LabeledBatch = None) -> np.ndarray:
        if batch is None or batch is self.batch:
            clean = self._clean
        else:
            clean = np.array([self.pipeline.clean_powers(int(d)) for d in batch.digits])
        key = (rngs.FROZEN_NOISE,) if self.frozen_noise else (rngs.TRAIN_NOISE, epoch)
        return self.pipeline.detect(clean, rngs.stream(self.noise_seed, *key))

    def normalizers(self, w, epoch: int):
        """Output and target normalizers as seen at ``epoch``."""
        batch = self.batch_for(epoch)
        t_norm = self._target_norm if batch is self.batch else calibrate(batch.targets)
        return calibrate(raw_output(w, self.powers(epoch, batch))), t_norm

    def __call__(self, w, epoch: int):
        batch = self.batch_for(epoch)
        t_norm = self._target_norm if batch is self.batch else calibrate(batch.targets)
        raw = raw_output(w, self.powers(epoch, batch))
        y = normalize(raw, calibrate(raw))
        return y, mse(y, normalize(batch.targets, t_norm))
