# chains/exceptions.py


class ChainError(Exception):
    """Base class for every error raised by the chain services."""


# Invalid input

class InvalidInput(ChainError, ValueError):
    """Input rejected before any computation starts."""


class NegativeRate(InvalidInput):
    pass


class NonFiniteRate(InvalidInput):
    pass


class InfeasibleReaction(InvalidInput):
    pass


class ZeroPropensity(InvalidInput):
    pass


class CountOverflow(InvalidInput):
    pass


class RequiresInterspecific(InvalidInput):
    pass


class RequiresNoIntra(InvalidInput):
    pass


class InvalidPlan(InvalidInput):
    pass


class ZeroTrials(InvalidInput):
    pass


# Failures while running

class NoConvergence(ChainError):
    pass


class NotDominating(ChainError):
    def __init__(self, config, message):
        super().__init__(message)
        self.config = config


class NotBracketed(ChainError):
    pass


class InvariantViolation(ChainError):
    pass


class ReplayMismatch(ChainError):
    pass
