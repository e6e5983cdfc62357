"""Exception types shared across the package."""


class SpeclabError(Exception):
    pass


class DomainError(SpeclabError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class ParityError(SpeclabError, ValueError):
    """Circulant-type operation called with an even size."""


class ArgumentError(SpeclabError, ValueError):
    pass


class ContractError(SpeclabError, ValueError):
    """Input violates a structural contract (e.g. asymmetric matrix)."""


class ConditioningError(SpeclabError, ArithmeticError):
    """Matrix too close to singular or indefinite for the requested operation."""


class NumericError(SpeclabError, RuntimeError):
    """Iterative routine failed to converge."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class UnknownCheckError(SpeclabError, KeyError):
    def __init__(self, check_id, valid):
        self.check_id = check_id
        self.valid = list(valid)
        super().__init__(f"unknown check {check_id!r}; valid ids: {', '.join(self.valid)}")

    def __str__(self):
        return self.args[0]


def require_odd(n, what="n"):
    if int(n) != n or n < 1 or n % 2 == 0:
        raise ParityError(f"{what} must be a positive odd integer, got {n}")
    return int(n)
