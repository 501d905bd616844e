"""Exception types shared across the package."""


class CatcohError(Exception):
    """Base class for package errors."""


class DomainError(CatcohError, ValueError):
    """Invalid physical parameters or states (maps to CLI exit code 1)."""


class StateFileError(CatcohError):
    """Unreadable or malformed input file (maps to CLI exit code 2)."""


class TruncationWarning(UserWarning):
    """Population beyond the Fock cutoff exceeds the configured threshold."""
