class RCRTError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(RCRTError, ValueError):
    """An argument lies outside the domain of the operation."""


class NotCoprimeError(DomainError):
    def __init__(self, a, b, gcd):
        super().__init__(f"{a} and {b} are not coprime (gcd = {gcd})")
        self.a = a
        self.b = b
        self.gcd = gcd


class InfeasibleDesignError(RCRTError):
    """No moduli set satisfies the requested constraints."""


class ConfigurationError(RCRTError):
    """A design cannot support the requested decoding configuration."""


class ConsistencyError(RCRTError, AssertionError):
    """An internal invariant was violated. Indicates a bug."""
