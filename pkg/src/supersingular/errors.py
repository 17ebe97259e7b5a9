"""Exception hierarchy.  The CLI maps each family onto an exit code."""


class SupersingularError(Exception):
    """Base class for every error raised by this package."""


class DomainError(SupersingularError, ValueError):
    """A mathematical precondition failed (wrong signature, not isotropic, ...)."""


class LatticeError(DomainError):
    pass


class FormError(DomainError):
    pass


class ExpressionError(SupersingularError, ValueError):
    """Malformed lattice expression or serialized object."""


class ValidationError(SupersingularError, ValueError):
    """An object failed its invariants while being loaded.

    ``path`` names the offending object (for example ``objects.gamma``).
    """

    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{path}: {message}" if path else message)
        self.message = message
        self.path = path


class CapExceeded(SupersingularError):
    """A configured search cap or budget was hit.

    Raised instead of returning a partial answer, so an exhausted search is
    never mistaken for a negative one.
    """


class Indeterminate(CapExceeded):
    """A yes/no question could not be settled within the configured cap."""
