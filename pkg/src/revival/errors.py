"""Exception hierarchy.

Every error carries an ``exit_code`` so the CLI can map failures without a
lookup table: 2 for domain guards, 3 for integration accuracy, 4 for bad
analysis input.
"""


class RevivalError(Exception):
    exit_code = 1


class DomainError(RevivalError, ValueError):
    exit_code = 2


class NoResonance(DomainError):
    pass


class SingularOrder(DomainError):
    pass


class DegenerateOrder(DomainError):
    pass


class FlatSpectrum(DomainError):
    pass


class WindowError(DomainError):
    pass


class ConvergenceError(RevivalError, ArithmeticError):
    exit_code = 3


class IntegrationAccuracyError(RevivalError, ArithmeticError):
    exit_code = 3


class AnalysisInputError(RevivalError, ValueError):
    exit_code = 4


class TraceTooShort(AnalysisInputError):
    pass
