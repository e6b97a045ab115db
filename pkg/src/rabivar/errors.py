"""Exception types shared across the package."""


class InvalidDimensionError(ValueError):
    pass


class TruncationError(ValueError):
    """A state does not fit in the truncated cavity space."""


class VanishingNormError(ValueError):
    """A superposition cancels (or nearly cancels) to the zero vector."""


class ParameterRangeError(ValueError):
    pass


class ResonanceError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    pass


class NonHermitianError(ValueError):
    pass


class DegenerateObjectiveError(RuntimeError):
    """Every candidate in a differential-evolution generation was rejected."""
