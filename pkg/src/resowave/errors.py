"""Exception types shared across the package."""


class ResowaveError(Exception):
    pass


class ResonanceError(ResowaveError):
    """A spectral denominator omega^2 l^2 - j^2 (or l^2 - j^2) is too close to zero."""

    def __init__(self, l, j, value):
        self.l = int(l)
        self.j = int(j)
        self.value = float(value)
        super().__init__(
            f"near-resonant denominator at mode (l={self.l}, j={self.j}): {self.value:.3e}"
        )


class ConvergenceError(ResowaveError):
    """An iteration failed to converge; carries whatever trace the caller attached."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace if trace is not None else []


class ClassificationError(ResowaveError):
    """The nonlinearity cannot be classified (e.g. no nonzero Taylor coefficient)."""


class ConfigError(ResowaveError):
    """Invalid or unknown configuration input (CLI exit code 2)."""
