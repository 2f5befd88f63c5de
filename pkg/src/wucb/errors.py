"""Exception hierarchy shared across the package."""


class WucbError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatch(WucbError, ValueError):
    pass


class AmbiguousOptimum(WucbError, ValueError):
    """Two arms tie for the best expected reward under some preference."""


class InvalidGamma(WucbError, ValueError):
    pass


class OutOfRangeObservation(WucbError, ValueError):
    pass


class UnknownPreference(WucbError, KeyError):
    pass


class HorizonTooShort(WucbError, ValueError):
    pass


class BelowThreshold(WucbError, ValueError):
    pass


class EpsOutOfRange(WucbError, ValueError):
    pass


class NotInS1(WucbError, ValueError):
    pass


class NotInS2(WucbError, ValueError):
    pass


class SupportMismatch(WucbError, ValueError):
    """KL divergence is infinite or undefined for the given pair of arms."""


class NonpositiveKL(WucbError, ValueError):
    pass


class SchemaError(WucbError, ValueError):
    """Config document has the wrong structure (missing/extra keys, wrong types)."""


class ConfigValidationError(WucbError, ValueError):
    """Config document is well-formed but violates a value constraint."""
