"""Exception hierarchy. Each class carries the CLI exit code for its category."""


class PrimeSumsError(Exception):
    exit_code = 5


class UsageError(PrimeSumsError, ValueError):
    exit_code = 2


class ContractError(UsageError):
    """Caller violated an input contract (e.g. a float where an exact alpha is required)."""


class DomainError(PrimeSumsError, ValueError):
    exit_code = 3


class ResourceError(PrimeSumsError, RuntimeError):
    exit_code = 4


class InvariantError(PrimeSumsError, AssertionError):
    exit_code = 5
