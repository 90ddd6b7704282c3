"""Exception hierarchy shared by all logsyn modules."""


class LogSynError(Exception):
    """Base class for every error raised by logsyn."""


class PrecisionMismatch(LogSynError, ValueError):
    """Two values with different primes or precisions were combined."""


class CompositionNotZero(LogSynError):
    """A pair of consecutive differentials does not compose to zero."""


class NonIntegralUnghost(LogSynError):
    """Inverting ghost components produced a non-integer coordinate."""


class NoSuchBasisElement(LogSynError, ValueError):
    """The requested (degree, weight) has no basis element in the model."""


class NegativeDividedPower(LogSynError):
    """A divided Frobenius or comparison map would need a negative power of p."""


class StabilizationFailure(LogSynError):
    """Orbit homology did not settle as the weight cutoff grew."""


class InsufficientPrecision(LogSynError):
    """Torsion and free summands could not be separated at the given precision."""


class UnexpectedOrbitContribution(LogSynError):
    """An orbit predicted to be acyclic contributed nonzero homology."""


class CrossCheckFailure(LogSynError):
    """A closed-form table disagrees with the assembled syntomic data."""
