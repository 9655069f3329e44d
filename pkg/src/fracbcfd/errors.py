#
# errors - Exception types raised by fracbcfd.
#

class GridError(ValueError):
    """A mesh violates the staggered grid invariants."""


class CoefficientError(ValueError):
    """A diffusion coefficient sampled negative or non-finite."""


class SoeError(RuntimeError):
    """Sum-of-exponentials construction failed or does not cover a range."""


class SingularSystemError(RuntimeError):
    """A dense system hit a zero pivot to working precision."""


class DenseCapError(ValueError):
    """A dense solver path was requested above the configured size cap."""
