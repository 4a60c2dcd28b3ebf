"""Greedy single-flip training of Boolean readout weights.

Each epoch inverts one randomly chosen weight, re-evaluates the batch error
and keeps the flip only if the error strictly decreased.
"""
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConfigError, DegenerateBatch


@dataclass(frozen=True)
class TrainerConfig:
    batch_size: int = 50
    target_eps: float = 2e-2
    max_epochs: int = 30000
    seed: int = 0
    resample_batch: bool = False
    frozen_noise: bool = False
    stop_on_stall: bool = True

    def __post_init__(self):
        if self.batch_size < 2:
            raise ConfigError("batch_size must be >= 2")
        if not self.target_eps > 0:
            raise ConfigError("target_eps must be positive")
        if self.max_epochs < 0:
            raise ConfigError("max_epochs must be >= 0")


@dataclass
class TrainingTrace:
    """Per-epoch record. Row 0 is the initial evaluation (no flip)."""

    eps: list = field(default_factory=list)
    flipped: list = field(default_factory=list)
    accepted: list = field(default_factory=list)
    trial_eps: list = field(default_factory=list)
    weights: Optional[np.ndarray] = None
    stop_reason: str = ""
    best_epoch: int = 0  # epoch whose evaluation produced the final eps

    @property
    def epochs_used(self) -> int:
        return len(self.eps) - 1

    @property
    def final_eps(self) -> float:
        return self.eps[-1]

    def eps_array(self) -> np.ndarray:
        return np.asarray(self.eps, dtype=float)

    def accepted_epochs(self) -> np.ndarray:
        return np.flatnonzero(np.asarray(self.accepted, dtype=bool))


def mse(y_out, y_target) -> float:
    """Mean squared residual."""
    y_out = np.asarray(y_out, dtype=float)
    y_target = np.asarray(y_target, dtype=float)
    if y_out.shape != y_target.shape:
        raise ValueError(f"shape mismatch {y_out.shape} vs {y_target.shape}")
    if y_out.size == 0:
        raise ValueError("empty series")
    return float(np.mean((y_out - y_target) ** 2))


Evaluator = Callable[[np.ndarray, int], tuple]


def train(evaluate: Evaluator, config: TrainerConfig, n_nodes: int,
          initial_weights=None):
    """Run greedy descent.

    Args:
        evaluate: ``evaluate(weights, epoch) -> (y_out, eps)``; must be
            deterministic in its arguments. May raise ``DegenerateBatch``.
        config: stopping rule and seed.
        n_nodes: number of readout weights.
        initial_weights: optional start point; default is seeded uniform 0/1.

    Returns:
        ``(weights, trace)``. The weights are the last accepted ones, which
        under strict-decrease acceptance are also the best seen.

    Stops at ``eps <= target_eps``, after ``max_epochs``, or (if
    ``stop_on_stall``) once every index has been flipped and rejected since
    the last accepted flip.
    """
    rng = np.random.default_rng(config.seed)
    if initial_weights is None:
        w = rng.integers(0, 2, n_nodes).astype(np.uint8)
    else:
        w = np.array(initial_weights, dtype=np.uint8)
        if w.shape != (n_nodes,):
            raise ValueError("initial weights have the wrong length")

    _, eps = evaluate(w.copy(), 0)
    trace = TrainingTrace(eps=[eps], flipped=[-1], accepted=[False], trial_eps=[eps])
    rejected = set()
    reason = "max_epochs"
    for epoch in range(1, config.max_epochs + 1):
        if eps <= config.target_eps:
            reason = "target"
            break
        if config.stop_on_stall and len(rejected) == n_nodes:
            reason = "stall"
            break
        l = int(rng.integers(n_nodes))
        w[l] ^= 1
        try:
            _, trial = evaluate(w.copy(), epoch)
        except DegenerateBatch:
            trial = np.inf
        ok = trial < eps
        if ok:
            eps = trial
            rejected.clear()
            trace.best_epoch = epoch
        else:
            w[l] ^= 1
            rejected.add(l)
        trace.eps.append(eps)
        trace.flipped.append(l)
        trace.accepted.append(ok)
        trace.trial_eps.append(trial)
    else:
        if eps <= config.target_eps:
            reason = "target"
        elif config.stop_on_stall and len(rejected) == n_nodes:
            reason = "stall"
    trace.stop_reason = reason
    trace.weights = w.copy()
    return w, trace


def fit_exponential_decay(trace, floor: float = 1e-12, tail_fraction: float = 1e-3,
                          min_accepted: int = 10):
    """Fit ``log(eps_k - eps_final + floor)`` linearly in ``k``.

    Only epochs where the error dropped enter the fit. Points whose excess
    over the final error has fallen below ``tail_fraction`` of the initial
    excess are dropped: close to the plateau the log of the excess is
    dominated by the arbitrary end point rather than the decay.

    Args:
        trace: a ``TrainingTrace`` or a 1-D error sequence (e.g. a mean trace).

    Returns:
        ``(rate, r_squared)`` with ``eps ~ exp(-rate * k)``.

    Raises:
        ValueError: if fewer than ``min_accepted`` drops are present.
    """
    eps = trace.eps_array() if isinstance(trace, TrainingTrace) else np.asarray(trace, dtype=float)
    if eps.ndim != 1 or eps.size == 0:
        raise ValueError("need a 1-D error sequence")
    drops = np.flatnonzero(np.diff(eps) < 0) + 1
    if drops.size < min_accepted:
        raise ValueError(f"only {drops.size} accepted epochs; need {min_accepted}")
    k = np.concatenate([[0], drops])
    excess = eps[k] - eps[-1] + floor
    keep = excess >= tail_fraction * excess[0]
    k, y = k[keep], np.log(excess[keep])
    if k.size < 3:
        raise ValueError("too few points above the plateau to fit")
    slope, intercept = np.polyfit(k, y, 1)
    resid = y - (slope * k + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return float(-slope), r2
