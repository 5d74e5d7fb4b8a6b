"""Exception types shared across the package."""


class EmlabError(Exception):
    """Base class for all package errors."""


class GridMismatchError(EmlabError, ValueError):
    """Operands live on different grids."""


class SingularPointError(EmlabError, ValueError):
    """Evaluation point fell inside the singularity cutoff of a kernel."""


class EmptySupportError(EmlabError, ValueError):
    """An average was requested over an empty support region."""


class StabilityError(EmlabError, ValueError):
    """Solver configuration violates the explicit-stepping stability guard."""


class BlowupError(EmlabError, RuntimeError):
    """A run produced non-finite fields or runaway energy growth."""


class SchemaError(EmlabError, ValueError):
    """Scenario configuration violates the documented schema.

    Carries the dotted key path of the offending entry.
    """

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")
