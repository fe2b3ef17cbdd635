"""Exception hierarchy shared by all solver modules."""


class HcxError(Exception):
    """Base class for all package errors."""


class InvalidInput(HcxError):
    """Input data violates a precondition (non-finite, wrong shape, bad range)."""


class DomainError(HcxError):
    """A dual evaluation was requested outside its admissible interval."""


class NoConvergence(HcxError):
    """Iteration budget exhausted.  Carries the best iterate found so far."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class DegenerateInstance(HcxError):
    """The instance falls outside the dual's case analysis (e.g. empty interval)."""


class InternalInconsistency(HcxError):
    """A state the upstream theory rules out was reached; indicates a solver bug."""
