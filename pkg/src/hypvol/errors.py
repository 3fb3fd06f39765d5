"""Exception hierarchy shared by every module."""


class HypvolError(Exception):
    """Base class for all library errors."""


class InvalidParameter(HypvolError, ValueError):
    pass


class AmbiguousClass(HypvolError):
    """Trace is too close to the parabolic/identity boundary to classify."""


class IdentityHasAllFixed(HypvolError):
    pass


class NotReal(HypvolError):
    pass


class DegenerateFrame(HypvolError):
    """Three frame points of a cross ratio are (numerically) not distinct."""


class DependentBasis(HypvolError):
    pass


class NonGenericConfiguration(HypvolError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotFound(HypvolError):
    """A certificate search ended without a witness. Not a disproof."""


class DiscsOverlap(NotFound):
    def __init__(self, message, margin=None):
        super().__init__(message)
        self.margin = margin


class BudgetExceeded(HypvolError):
    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class EmptyFamily(HypvolError):
    pass
