"""Exception hierarchy shared by all modules."""


class CS3Error(Exception):
    pass


class NotClosed(CS3Error):
    """A bracket of basis elements leaves their span."""


class DependentBasis(CS3Error):
    pass


class NotInAlgebra(CS3Error):
    pass


class DegenerateRestriction(CS3Error):
    pass


class AlgebraMismatch(CS3Error):
    pass


class DegreeOverflow(CS3Error):
    pass


class PreconditionViolated(CS3Error):
    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class NotInGroup(CS3Error):
    pass


class SingularSystem(CS3Error):
    pass


class NotInvariant(CS3Error):
    pass


class NonConvergent(CS3Error):
    pass


class EvaluationError(CS3Error):
    pass


class UnknownExample(CS3Error):
    pass


class OutOfScope(UnknownExample):
    pass
