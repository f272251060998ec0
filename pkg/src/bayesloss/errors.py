"""Exception types raised across the package."""


class ValidationError(ValueError):
    """Input failed a structural or domain check."""


class DrawsParseError(ValidationError):
    """A draws or dataset file could not be parsed.

    ``row`` is the 1-based line number in the file (header = line 1), or
    ``None`` when the problem is not tied to a single row.
    """

    def __init__(self, message, row=None):
        if row is not None:
            message = f"line {row}: {message}"
        super().__init__(message)
        self.row = row


class SamplerDivergenceError(RuntimeError):
    """The sampler could not find a point of finite log-posterior."""


class NotConvergedError(RuntimeError):
    """Chains failed the split-R-hat check and the caller asked for converged draws."""
