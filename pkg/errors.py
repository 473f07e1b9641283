class EulerTopError(Exception):
    """Base class of every error raised by the toolkit."""


class ConfigError(EulerTopError):
    """Experiment configuration is malformed or incomplete."""

    def __init__(self, message, path=None, line=None):
        super().__init__(message)
        self.path = path
        self.line = line

    def anchored(self):
        where = self.path or "<config>"
        if self.line is not None:
            where = f"{where}:{self.line}"
        return f"{where}: {self}"


class NumericError(EulerTopError):
    """A computation could not produce a valid result."""


class InvalidStateError(NumericError):
    pass


class IntegrationDivergedError(NumericError):
    def __init__(self, message, last_valid_index, samples=None):
        super().__init__(message)
        self.last_valid_index = last_valid_index
        self.samples = samples


class NotApplicableError(NumericError):
    pass


class InvalidGaugeError(NumericError):
    pass


class NotLmgError(NumericError):
    pass


class DegenerateAxisError(NumericError):
    pass


class InvalidPointError(NumericError):
    pass


class PreconditionError(NumericError):
    pass


class UndefinedProtocolError(NumericError):
    pass


class NoBistabilityError(NumericError):
    pass
