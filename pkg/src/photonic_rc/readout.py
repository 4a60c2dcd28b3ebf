"""Boolean output mirrors, detector summation and output standardization."""
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateBatch


def as_weights(w, n_nodes=None) -> np.ndarray:
    """Validate a 0/1 weight vector and return it as ``uint8``."""
    arr = np.asarray(w)
    if arr.ndim != 1:
        raise ValueError("weights must be 1-D")
    if not np.all((arr == 0) | (arr == 1)):
        raise ValueError("weights must be Boolean (0/1)")
    if n_nodes is not None and arr.size != n_nodes:
        raise ValueError(f"expected {n_nodes} weights, got {arr.size}")
    return arr.astype(np.uint8)


def raw_output(w, P) -> np.ndarray:
    """Incoherent detector signal ``sum_i w_i P_i``.

    ``P`` may be one power vector or a batch with nodes on the last axis.
    """
    w = np.asarray(w)
    P = np.asarray(P, dtype=float)
    if P.shape[-1] != w.shape[0]:
        raise ValueError(f"{w.shape[0]} weights for {P.shape[-1]} nodes")
    return P @ w.astype(float)


@dataclass(frozen=True)
class Normalizer:
    mu: float
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise DegenerateBatch(f"sigma must be positive, got {self.sigma}")

    def __call__(self, raw):
        return normalize(raw, self)

    def invert(self, y):
        return np.asarray(y) * self.sigma + self.mu


def calibrate(raw) -> Normalizer:
    """Batch mean and population standard deviation.

    Raises:
        DegenerateBatch: for constant batches, e.g. an all-dark readout.
    """
    raw = np.asarray(raw, dtype=float).ravel()
    if raw.size < 2:
        raise ValueError("calibration needs at least two samples")
    mu = float(raw.mean())
    sigma = float(raw.std())
    # relative floor: rounding noise on a constant batch is not a signal
    if sigma <= 1e-13 * max(abs(mu), np.finfo(float).tiny):
        raise DegenerateBatch("constant batch cannot be standardized")
    return Normalizer(mu, sigma)


def normalize(raw, normalizer: Normalizer):
    return (np.asarray(raw, dtype=float) - normalizer.mu) / normalizer.sigma


def threshold_classify(y_out, levels):
    """1 where ``y_out`` lies strictly above the midpoint of two target levels."""
    lo, hi = levels
    mid = 0.5 * (lo + hi)
    out = (np.asarray(y_out) > mid).astype(int)
    return int(out) if out.ndim == 0 else out
