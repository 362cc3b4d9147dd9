"""Exception hierarchy.

Numerical failures derive from :class:`NumericalError` so the CLI can map them
to a single exit code.
"""


class EvbcError(Exception):
    """Base class for all package errors."""


class NumericalError(EvbcError):
    pass


class OutOfDomain(EvbcError, ValueError):
    pass


class InvalidDomain(EvbcError, ValueError):
    pass


class DegenerateJump(NumericalError):
    """A boundary jump coefficient E(a) or E(b) vanishes."""


class SingularQ(NumericalError):
    def __init__(self, index, value):
        self.index = index
        self.value = value
        super().__init__(f"Q is singular: |diag[{index}]| = {abs(value):.3e} below threshold")


class ConvergenceFailure(NumericalError):
    pass


class SingularTransfer(NumericalError):
    pass


class ZeroDenominator(NumericalError):
    pass


class OracleDegree(EvbcError, ValueError):
    pass


class ConfigError(EvbcError):
    def __init__(self, key, reason):
        self.key = key
        self.reason = reason
        super().__init__(f"{key}: {reason}" if key else reason)


class ColumnNotFound(EvbcError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "column not found"
