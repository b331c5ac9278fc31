"""Exception hierarchy shared by all modules."""


class AbcError(Exception):
    """Base class for every error raised by this package."""


class EmptyBallot(AbcError):
    pass


class BadCandidate(AbcError):
    pass


class TooManyAbstainers(AbcError):
    pass


class AllVotersAbstain(AbcError):
    pass


class InvariantError(AbcError):
    pass


class BadScoring(AbcError):
    pass


class TooLarge(AbcError):
    pass


class BranchExplosion(AbcError):
    pass


class NoBuyer(AbcError):
    """No remaining candidate has an approver, so the committee cannot be filled."""


class NotLaminar(AbcError):
    pass


class NotCubic(AbcError):
    pass


class BadK(AbcError):
    pass


class TBoundViolated(AbcError):
    pass


class NotRegular(AbcError):
    pass


class BudgetExceeded(AbcError):
    pass


class ParseError(AbcError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
