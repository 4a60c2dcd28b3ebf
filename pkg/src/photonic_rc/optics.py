"""Fixed random input connections.

Light leaving the input pattern is scattered into a few dozen fiber modes,
and the fiber near field is imaged onto the laser surface. Both stages are
modeled as dense complex Gaussian matrices with unit-norm columns, so the
mode count bounds the rank of the overall pixel-to-node map.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .encoder import BooleanImage


@dataclass(frozen=True, eq=False)
class TransferMatrix:
    entries: np.ndarray
    seed: Optional[int] = None

    def __post_init__(self):
        arr = np.array(self.entries, dtype=complex, copy=True)
        if arr.ndim != 2:
            raise ValueError("transfer matrix must be 2-D")
        if not np.all(np.isfinite(arr)):
            raise ValueError("transfer matrix has non-finite entries")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def shape(self):
        return self.entries.shape

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    def operator_norm(self) -> float:
        return float(np.linalg.norm(self.entries, 2))

    def __matmul__(self, other):
        return self.entries @ other


def _column_normalized_gaussian(seed: int, rows: int, cols: int) -> TransferMatrix:
    if rows < 1 or cols < 1:
        raise ValueError(f"matrix dimensions must be positive, got {rows}x{cols}")
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
    m /= np.linalg.norm(m, axis=0)
    return TransferMatrix(m, seed)


def sample_fiber_matrix(seed: int, modes: int = 36, pixels: int = 96 * 96) -> TransferMatrix:
    """Pixel field -> fiber modes, shape ``(modes, pixels)``."""
    return _column_normalized_gaussian(seed, modes, pixels)


def sample_injection_matrix(seed: int, nodes: int = 131, modes: int = 36) -> TransferMatrix:
    """Fiber modes -> reservoir nodes, shape ``(nodes, modes)``."""
    return _column_normalized_gaussian(seed, nodes, modes)


def propagate(field: np.ndarray, fiber: TransferMatrix, imaging: TransferMatrix) -> np.ndarray:
    """Apply both stages to a flattened pixel field."""
    field = np.asarray(field).ravel()
    if field.size != fiber.cols:
        raise ValueError(f"field has {field.size} pixels, fiber expects {fiber.cols}")
    if imaging.cols != fiber.rows:
        raise ValueError(f"imaging expects {imaging.cols} modes, fiber provides {fiber.rows}")
    return imaging.entries @ (fiber.entries @ field)


def inject(image: BooleanImage, illum: np.ndarray, fiber: TransferMatrix,
           imaging: TransferMatrix) -> np.ndarray:
    """Complex injection per node for a Boolean pattern under Gaussian illumination."""
    illum = np.asarray(illum, dtype=float)
    if illum.shape != image.active.shape:
        raise ValueError(f"illumination shape {illum.shape} != image shape {image.active.shape}")
    return propagate(illum.ravel() * image.amplitudes(), fiber, imaging)
