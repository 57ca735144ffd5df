"""Exception hierarchy shared by all modules."""


class MixMarketError(Exception):
    """Base class for every error raised by the package."""


class DomainError(MixMarketError, ValueError):
    """An argument lies outside the domain where a function is defined."""


class ParameterError(MixMarketError, ValueError):
    """Market parameters violate a model assumption."""


class NotRegularError(MixMarketError, ValueError):
    """The value distribution fails the regularity check."""


class ConvergenceError(MixMarketError, RuntimeError):
    """A root bracket or fixed point iteration failed."""


class DegenerateSlopeError(ConvergenceError):
    """Implicit differentiation hit a vanishing slope."""
