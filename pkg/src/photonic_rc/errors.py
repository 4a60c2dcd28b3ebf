"""Exception types shared across the simulator."""


class PhotonicRCError(Exception):
    """Base class for all package errors."""


class ConfigError(PhotonicRCError, ValueError):
    """Invalid or inconsistent configuration."""


class NonConvergence(PhotonicRCError):
    """The reservoir fixed-point iteration did not reach tolerance.

    Attributes:
        residual: final sup-norm step size.
        iterations: number of iterations performed.
        sample_index: index of the offending sample, when known.
    """

    def __init__(self, residual, iterations, sample_index=None):
        self.residual = float(residual)
        self.iterations = int(iterations)
        self.sample_index = sample_index
        msg = f"fixed point not reached after {iterations} iterations (residual {residual:.3e})"
        if sample_index is not None:
            msg += f" at sample {sample_index}"
        super().__init__(msg)

    def with_sample(self, sample_index):
        return NonConvergence(self.residual, self.iterations, sample_index)


class DegenerateBatch(PhotonicRCError, ValueError):
    """A batch has zero spread, so it cannot be standardized."""
