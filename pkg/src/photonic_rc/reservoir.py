"""Steady-state surrogate of the injection-locked multimode laser.

Nodes sit on concentric rings of a unit disc. Each node field obeys the
saturable map

    F_i(x) = g * (kappa * (W x)_i + e_i) / (1 + |x_i|**2)

where ``W`` is a short-range random complex coupling and ``e`` the optical
injection. The reservoir state is the fixed point ``x = F(x)``, found by
damped iteration. Detected powers are ``|x|**2`` with multiplicative noise.
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigError, NonConvergence


@dataclass(frozen=True)
class ReservoirParams:
    n_nodes: int = 131
    gain: float = 1.5
    coupling: float = 0.15
    diffusion_radius: Optional[float] = None  # None: 1.5 ring spacings
    noise_sigma: float = 1e-3
    relax_alpha: float = 0.5
    tol: float = 1e-10
    max_iters: int = 10000
    seed: int = 0

    def __post_init__(self):
        if self.n_nodes < 1:
            raise ConfigError("n_nodes must be >= 1")
        if not 0 < self.relax_alpha <= 1:
            raise ConfigError("relax_alpha must lie in (0, 1]")
        if self.tol <= 0:
            raise ConfigError("tol must be positive")
        if self.coupling < 0:
            raise ConfigError("coupling must be >= 0")
        if self.gain < 0:
            raise ConfigError("gain must be >= 0")
        if self.noise_sigma < 0:
            raise ConfigError("noise_sigma must be >= 0")
        if self.max_iters < 1:
            raise ConfigError("max_iters must be >= 1")
        if self.diffusion_radius is not None and self.diffusion_radius < 0:
            raise ConfigError("diffusion_radius must be >= 0")


def ring_counts(n_nodes: int) -> list:
    """Split ``n_nodes`` over rings: 1 at the center, then 6k on ring k.

    The outermost ring absorbs the remainder once the rest would not fill
    another complete ring; 131 nodes gives [1, 6, 12, 18, 24, 30, 40].
    """
    if n_nodes < 1:
        raise ValueError("n_nodes must be >= 1")
    counts = [1]
    remaining = n_nodes - 1
    k = 1
    while remaining > 0:
        if remaining < 6 * k + 6 * (k + 1):
            counts.append(remaining)
            break
        counts.append(6 * k)
        remaining -= 6 * k
        k += 1
    return counts


@dataclass(frozen=True, eq=False)
class DiskLayout:
    counts: tuple
    ring: np.ndarray
    angle: np.ndarray
    radius: np.ndarray

    @property
    def n_nodes(self) -> int:
        return len(self.ring)

    @property
    def n_rings(self) -> int:
        return len(self.counts)

    @property
    def ring_spacing(self) -> float:
        return 1.0 / (self.n_rings - 1) if self.n_rings > 1 else 1.0

    @property
    def positions(self) -> np.ndarray:
        return np.column_stack([self.radius * np.cos(self.angle), self.radius * np.sin(self.angle)])

    def distances(self) -> np.ndarray:
        p = self.positions
        return np.hypot(p[:, None, 0] - p[None, :, 0], p[:, None, 1] - p[None, :, 1])


def build_layout(n_nodes: int = 131) -> DiskLayout:
    counts = ring_counts(n_nodes)
    n_rings = len(counts)
    rings, angles, radii = [], [], []
    for k, c in enumerate(counts):
        r = k / (n_rings - 1) if n_rings > 1 else 0.0
        for j in range(c):
            rings.append(k)
            angles.append(2 * np.pi * j / c)
            radii.append(r)
    return DiskLayout(tuple(counts), np.array(rings), np.array(angles), np.array(radii))


@dataclass(frozen=True, eq=False)
class CouplingMatrix:
    entries: np.ndarray
    spectral_radius: float  # of kappa * |W|


def build_internal_coupling(layout: DiskLayout, params: ReservoirParams) -> CouplingMatrix:
    """Distance-limited random complex coupling with unit row sums of ``|W|``."""
    radius = params.diffusion_radius
    if radius is None:
        radius = 1.5 * layout.ring_spacing
    dist = layout.distances()
    n = layout.n_nodes
    rng = np.random.default_rng(params.seed)
    mag = rng.uniform(0.5, 1.0, (n, n))
    phase = rng.uniform(0.0, 2 * np.pi, (n, n))
    mask = dist <= radius
    np.fill_diagonal(mask, False)
    mag = np.where(mask, mag, 0.0)
    rowsum = mag.sum(axis=1, keepdims=True)
    mag = np.divide(mag, rowsum, out=np.zeros_like(mag), where=rowsum > 0)
    w = mag * np.exp(1j * phase)
    rho = float(np.max(np.abs(np.linalg.eigvals(params.coupling * mag)))) if n > 0 else 0.0
    return CouplingMatrix(w, rho)


@dataclass
class ReservoirState:
    x: np.ndarray
    iterations_used: int
    residual: float
    P: np.ndarray = field(init=False)

    def __post_init__(self):
        self.P = np.abs(self.x) ** 2


def field_map(x: np.ndarray, injection: np.ndarray, params: ReservoirParams,
              coupling: CouplingMatrix) -> np.ndarray:
    drive = params.coupling * (coupling.entries @ x) + injection
    return params.gain * drive / (1.0 + np.abs(x) ** 2)


def steady_state(injection, params: ReservoirParams, coupling: CouplingMatrix,
                 x0=None) -> ReservoirState:
    """Damped fixed-point iteration ``x <- (1-a) x + a F(x)``.

    Stops once the sup-norm step is at most ``params.tol``.

    Raises:
        NonConvergence: after ``params.max_iters`` iterations.
    """
    e = np.asarray(injection, dtype=complex)
    if e.shape != (params.n_nodes,) or coupling.entries.shape != (params.n_nodes,) * 2:
        raise ValueError("injection/coupling shapes do not match n_nodes")
    x = np.zeros_like(e) if x0 is None else np.array(x0, dtype=complex)
    a = params.relax_alpha
    residual = np.inf
    for it in range(1, params.max_iters + 1):
        x_new = (1 - a) * x + a * field_map(x, e, params, coupling)
        residual = float(np.max(np.abs(x_new - x), initial=0.0))
        x = x_new
        if residual <= params.tol:
            return ReservoirState(x, it, residual)
    raise NonConvergence(residual, params.max_iters)


def detect_powers(state: ReservoirState, params: ReservoirParams,
                  rng: np.random.Generator) -> np.ndarray:
    """Node powers with multiplicative Gaussian detection noise, clipped at 0."""
    return noisy_powers(state.P, params.noise_sigma, rng)


def noisy_powers(P: np.ndarray, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """``P * (1 + eta)`` for any array shape; one draw per entry."""
    P = np.asarray(P, dtype=float)
    if sigma == 0:
        return P.copy()
    eta = rng.standard_normal(P.shape) * sigma
    return np.clip(P * (1.0 + eta), 0.0, None)


def check_locking(injection, params: ReservoirParams, coupling: CouplingMatrix,
                  rng: np.random.Generator, starts: int = 5, atol: float = 1e-8) -> float:
    """Converge from zero and ``starts`` random initial states.

    Returns the largest deviation from the zero-start fixed point. Raises
    ``ConfigError`` if it exceeds ``atol``, which means the parameters do not
    lock the reservoir to its injection.
    """
    ref = steady_state(injection, params, coupling).x
    scale = max(1.0, float(np.max(np.abs(ref), initial=0.0)))
    worst = 0.0
    for _ in range(starts):
        x0 = scale * (rng.standard_normal(params.n_nodes) + 1j * rng.standard_normal(params.n_nodes))
        x = steady_state(injection, params, coupling, x0).x
        worst = max(worst, float(np.max(np.abs(x - ref), initial=0.0)))
    if worst > atol:
        raise ConfigError(f"reservoir not locked: start-dependent fixed point (spread {worst:.2e})")
    return worst
