"""Benchmark tasks on n-bit digits: header recognition, XOR and DAC."""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import rng as rngs
from .errors import ConfigError, NonConvergence
from .readout import Normalizer, normalize, raw_output, threshold_classify

KINDS = ("header", "xor", "dac")


@dataclass(frozen=True)
class TaskSpec:
    kind: str = "header"
    digit: int = 3  # only used by header
    n_bits: int = 2

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown task kind {self.kind!r}; expected one of {KINDS}")
        if self.n_bits < 1:
            raise ConfigError("n_bits must be >= 1")
        if self.kind == "xor" and self.n_bits != 2:
            raise ConfigError("xor is defined on 2-bit digits")
        if self.kind == "header" and not 0 <= self.digit < 2**self.n_bits:
            raise ConfigError(f"header digit {self.digit} out of range")

    @property
    def n_digits(self) -> int:
        return 2**self.n_bits

    @property
    def is_classification(self) -> bool:
        return self.kind != "dac"

    @property
    def name(self) -> str:
        return f"header{self.digit}" if self.kind == "header" else self.kind


@dataclass(frozen=True, eq=False)
class LabeledBatch:
    digits: np.ndarray
    targets: np.ndarray

    def __post_init__(self):
        if len(self.digits) != len(self.targets):
            raise ValueError("digits and targets differ in length")

    def __len__(self):
        return len(self.digits)


@dataclass
class Metrics:
    ser: Optional[float]
    residual_std: float
    nmse: float
    n_samples: int
    n_repeats: int = 1


def target(spec: TaskSpec, d: int) -> float:
    if not 0 <= d < spec.n_digits:
        raise ValueError(f"digit {d} out of range")
    if spec.kind == "header":
        return 1.0 if d == spec.digit else 0.0
    if spec.kind == "xor":
        return float((d & 1) ^ ((d >> 1) & 1))
    return d / (spec.n_digits - 1)


def targets_for(spec: TaskSpec, digits) -> np.ndarray:
    return np.array([target(spec, int(d)) for d in digits], dtype=float)


def _uniform_batch(spec: TaskSpec, size: int, gen: np.random.Generator) -> LabeledBatch:
    if size < spec.n_digits:
        raise ValueError(f"batch of {size} is smaller than the {spec.n_digits} classes")
    digits = gen.integers(0, spec.n_digits, size)
    return LabeledBatch(digits, targets_for(spec, digits))


def generate_train_batch(spec: TaskSpec, size: int = 50, seed: int = 0, epoch: int = 0) -> LabeledBatch:
    """Training batch; header batches hold ``ceil(size/2)`` positives.

    ``epoch`` selects an independent batch for resampled training.
    """
    key = (rngs.TRAIN_BATCH,) if epoch == 0 else (rngs.RESAMPLED_BATCH, epoch)
    gen = rngs.stream(seed, *key)
    if spec.kind != "header":
        return _uniform_batch(spec, size, gen)
    if size < 2:
        raise ValueError("header batches need at least 2 samples")
    n_pos = -(-size // 2)
    others = np.array([d for d in range(spec.n_digits) if d != spec.digit])
    digits = np.concatenate([np.full(n_pos, spec.digit), gen.choice(others, size - n_pos)])
    gen.shuffle(digits)
    return LabeledBatch(digits, targets_for(spec, digits))


def generate_test_batch(spec: TaskSpec, size: int = 1000, seed: int = 0, repeat: int = 0) -> LabeledBatch:
    """Uniform test batch from a stream domain disjoint from training."""
    return _uniform_batch(spec, size, rngs.stream(seed, rngs.TEST_BATCH, repeat))


def evaluate(weights, spec: TaskSpec, batch: LabeledBatch, pipeline, output_norm: Normalizer,
             target_norm: Normalizer, noise_seed: int = 0, repeat: int = 0) -> Metrics:
    """Run the full pipeline on a batch with frozen training-time normalizers.

    Each sample draws detection noise from its own stream
    ``(noise_seed, TEST_NOISE, repeat, index)``.

    Returns SER (classification only), the residual standard deviation and
    NMSE, both in the original target scale.

    Raises:
        NonConvergence: tagged with the first failing sample index.
    """
    powers = np.empty((len(batch), pipeline.n_nodes))
    for i, d in enumerate(batch.digits):
        try:
            clean = pipeline.clean_powers(int(d))
        except NonConvergence as exc:
            raise exc.with_sample(i) from exc
        gen = rngs.stream(noise_seed, rngs.TEST_NOISE, repeat, i)
        powers[i] = pipeline.detect(clean, gen)
    y = normalize(raw_output(weights, powers), output_norm)
    y_t = normalize(batch.targets, target_norm)
    resid = (y - y_t) * target_norm.sigma
    var_t = float(np.var(batch.targets))
    nmse = float(np.mean(resid**2) / var_t) if var_t > 0 else float("nan")
    ser = None
    if spec.is_classification:
        levels = normalize(np.array([0.0, 1.0]), target_norm)
        decided = threshold_classify(y, levels)
        ser = float(np.mean(decided != batch.targets.astype(int)))
    return Metrics(ser=ser, residual_std=float(np.std(resid)), nmse=nmse, n_samples=len(batch))

