"""Exception hierarchy shared by all modules."""


class NBColorError(Exception):
    """Base class for every error raised by nbcolor."""


class ParseError(NBColorError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SelfLoopError(ParseError):
    pass


class ParameterError(NBColorError, ValueError):
    pass


class EligibilityError(NBColorError):
    """The input graph violates a structural precondition (cycle, bipartite, girth, ...)."""


class ConvergenceError(NBColorError):
    def __init__(self, message, best_residual=None):
        self.best_residual = best_residual
        super().__init__(message)


class SizeError(NBColorError):
    pass


class DomainError(NBColorError, ValueError):
    pass


class InvalidPremiseError(NBColorError):
    """A certificate premise (PSD-ness of L(r), constraint on W) does not hold."""

    def __init__(self, message, evidence=None):
        self.evidence = evidence
        super().__init__(message)


class ConstraintViolation(InvalidPremiseError):
    def __init__(self, constraint, residual):
        self.constraint = constraint
        self.residual = residual
        super().__init__(f"constraint violated: {constraint} (residual {residual:.3e})", residual)


class WrongGraphError(NBColorError):
    pass


class StructureError(NBColorError):
    pass
