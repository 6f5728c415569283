class CCPoincareError(Exception):
    """Base class for errors raised by this package."""


class InputError(CCPoincareError, ValueError):
    """Malformed input: bad index, mismatched shapes, unreadable file."""


class ParameterError(CCPoincareError, ValueError):
    """A parameter lies outside the range an operation accepts."""


class CapacityError(CCPoincareError):
    """The requested computation exceeds a configured size cap."""


class DiagnosticError(CCPoincareError):
    """A checker could not produce a verdict from the sample it was given."""


class EmptyConstraintError(CCPoincareError):
    """The admissible tuple set defining phi(B) is empty."""


class DisconnectedGraphError(CCPoincareError):
    """Some grid node cannot be reached by admissible moves."""
