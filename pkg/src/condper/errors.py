"""Exception hierarchy.

Validation problems (bad arguments, malformed input) derive from
:class:`ValidationError`; failures that only show up while computing
(no dominant frequency, degenerate point clouds) derive from
:class:`ComputationError`. The CLI maps the two families to distinct exit codes.
"""


class CondperError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(CondperError, ValueError):
    """An argument or input violates a documented precondition."""


class UnsupportedInputError(ValidationError):
    """Input is well formed but outside what an operation supports."""


class DomainError(ValidationError):
    """Evaluation point outside the domain of a fitted signal."""


class ContractError(ValidationError):
    """Caller skipped a required preparation step."""


class ComputationError(CondperError):
    """A computation could not produce a meaningful result."""


class NoDominantFrequency(ComputationError):
    """The spectrum carries no power outside the DC bin."""

    def __init__(self, message, series=None):
        super().__init__(message)
        self.series = series


class DegeneratePointError(ComputationError):
    """A point cloud contains a point that cannot be normalized."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index
