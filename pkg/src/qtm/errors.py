"""Exception types shared across the package.

Two families matter to callers (and to the CLI exit codes): bad input
(``SpecError`` and friends, all ``ValueError``) and failed numerical checks
(``NumericalCheckError``).
"""


class SpecError(ValueError):
    """A machine parameterization violates one of its structural constraints."""


class ConfigError(ValueError):
    """A run configuration could not be parsed or validated."""


class NumericalCheckError(RuntimeError):
    """A physical identity or numerical invariant failed to hold."""


class DegenerateSteadyStateError(NumericalCheckError):
    """The generator has more than one stationary state."""


class IntegrationError(NumericalCheckError):
    """Time integration left its stability or trace-drift envelope."""


class TruncationError(NumericalCheckError):
    """The weight ladder boundary carries too much population to trust a measurement."""


class UndefinedPerformanceError(NumericalCheckError):
    """COP / efficiency requested for a stalled machine (Q1 is numerically zero)."""
