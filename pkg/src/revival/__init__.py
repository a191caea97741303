"""Revival time scales of wave packets in periodically driven 1-D potentials.

Analytic predictions come from mapping the driven amplitude equations onto a
Mathieu equation; :mod:`revival.propagate` integrates the driven Schrödinger
equation directly so the predictions can be checked against real traces.
"""

__version__ = "0.1.0"

from revival.errors import (  # noqa: F401
    AnalysisInputError,
    ConvergenceError,
    DegenerateOrder,
    DomainError,
    FlatSpectrum,
    IntegrationAccuracyError,
    NoResonance,
    RevivalError,
    SingularOrder,
    TraceTooShort,
    WindowError,
)
