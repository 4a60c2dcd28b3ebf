"""Boolean input patterns for the input micro-mirror array.

An input frame is the union of a constantly active locking ring and a set
of pie-wedge sectors, one per bit of the encoded digit. Pixels belong to a
region when their center satisfies the region's predicate.
"""
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class EncoderGeometry:
    """Raster and disc geometry of the input pattern (all lengths in pixels).

    ``ring_thickness`` may equal the disc radius, in which case the ring
    covers the whole disc and no interior is left for data wedges.
    """

    grid_side: int = 96
    disc_diameter: float = 90.0
    ring_thickness: float = 10.0
    n_bits: int = 2
    illumination_waist: float = 45.0

    def __post_init__(self):
        if self.grid_side < 1:
            raise ConfigError("grid_side must be positive")
        if not 0 < self.disc_diameter <= self.grid_side:
            raise ConfigError("disc_diameter must lie in (0, grid_side]")
        if not 0 <= self.ring_thickness <= self.radius:
            raise ConfigError("ring_thickness must lie in [0, disc_diameter/2]")
        if self.n_bits < 1:
            raise ConfigError("n_bits must be >= 1")
        if self.illumination_waist <= 0:
            raise ConfigError("illumination_waist must be positive")

    @property
    def radius(self) -> float:
        return self.disc_diameter / 2

    @property
    def inner_radius(self) -> float:
        return self.radius - self.ring_thickness

    @property
    def n_pixels(self) -> int:
        return self.grid_side * self.grid_side


@dataclass(frozen=True, eq=False)
class BooleanImage:
    """A square 0/1 mirror pattern; ``active`` is a read-only bool array."""

    active: np.ndarray

    def __post_init__(self):
        arr = np.array(self.active, dtype=bool, copy=True)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"expected a square 2-D pattern, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "active", arr)

    @property
    def grid_side(self) -> int:
        return self.active.shape[0]

    @property
    def count(self) -> int:
        return int(self.active.sum())

    def amplitudes(self) -> np.ndarray:
        """Row-major 0/1 float amplitudes."""
        return self.active.ravel().astype(float)

    def __eq__(self, other):
        if not isinstance(other, BooleanImage):
            return NotImplemented
        return np.array_equal(self.active, other.active)

    def __hash__(self):
        return hash(self.active.tobytes())


def _polar(geometry: EncoderGeometry):
    # disc center sits at the raster center; rows grow downward, so flip y
    # to make angles counterclockwise on the displayed image
    idx = np.arange(geometry.grid_side) + 0.5 - geometry.grid_side / 2
    dy, dx = np.meshgrid(-idx, idx, indexing="ij")
    r = np.hypot(dx, dy)
    theta = np.mod(np.arctan2(dy, dx), 2 * np.pi)
    return r, theta


def make_dc_ring(geometry: EncoderGeometry) -> BooleanImage:
    """Constantly active annulus ``R - thickness <= r < R``."""
    r, _ = _polar(geometry)
    return BooleanImage((r >= geometry.inner_radius) & (r < geometry.radius))


def encode_digit(d: int, geometry: EncoderGeometry) -> BooleanImage:
    """Wedge pattern for digit ``d``.

    The interior disc is split into ``n_bits`` equal sectors; sector ``b``
    starts at angle ``2*pi*b/n_bits`` and is lit iff bit ``b`` of ``d`` is set.
    """
    n = geometry.n_bits
    if not 0 <= d < 2**n:
        raise ValueError(f"digit {d} out of range for {n} bits")
    r, theta = _polar(geometry)
    interior = r < geometry.inner_radius
    sector = np.minimum((theta * n / (2 * np.pi)).astype(int), n - 1)
    bits = (d >> sector) & 1
    return BooleanImage(interior & (bits == 1))


def compose_input(dc: BooleanImage, data: BooleanImage) -> BooleanImage:
    """Pixelwise OR of two patterns on the same raster."""
    if dc.grid_side != data.grid_side:
        raise ValueError(f"grid mismatch: {dc.grid_side} vs {data.grid_side}")
    return BooleanImage(dc.active | data.active)


def input_image(d: int, geometry: EncoderGeometry) -> BooleanImage:
    return compose_input(make_dc_ring(geometry), encode_digit(d, geometry))


def illumination_profile(geometry: EncoderGeometry) -> np.ndarray:
    """Gaussian field amplitude ``exp(-r**2 / w**2)`` with unit peak."""
    r, _ = _polar(geometry)
    return np.exp(-(r**2) / geometry.illumination_waist**2)
