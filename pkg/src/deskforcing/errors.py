"""Exception types shared across the package.

Every domain failure derives from ``DomainError`` so the CLI can map it to
exit code 1 in one place.
"""


class DomainError(ValueError):
    pass


class FormulaSyntaxError(DomainError):
    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} at position {position}"
        super().__init__(message)


class RenamingError(DomainError):
    pass


class CaptureError(DomainError):
    pass


class EvaluationError(DomainError):
    pass


class HFSyntaxError(DomainError):
    pass


class StageTooLarge(DomainError):
    pass


class NotAPair(DomainError):
    pass


class OrdinalSyntaxError(DomainError):
    pass


class OrdinalOverflow(DomainError):
    pass


class CardinalSyntaxError(DomainError):
    pass


class NotWellFounded(DomainError):
    pass


class NotExtensional(DomainError):
    pass


class PosetError(DomainError):
    pass


class InfinitePosetError(PosetError):
    pass


class FinderFailure(DomainError):
    pass


class NoDeltaSystem(DomainError):
    pass


class AntichainError(DomainError):
    pass


class BudgetExceeded(DomainError):
    pass


class ProofError(DomainError):
    pass
