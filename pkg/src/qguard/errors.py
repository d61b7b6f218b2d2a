"""Exception types shared across the package."""

from __future__ import annotations


class QGuardError(Exception):
    """Base class for every error raised by this package."""


class CircuitError(QGuardError, ValueError):
    """A gate or circuit violates a structural invariant."""


class DocumentError(QGuardError, ValueError):
    """A serialized document is malformed; ``path`` locates the offending field."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class NormConservationError(QGuardError):
    """A statevector lost unit norm beyond tolerance; indicates a simulator bug."""


class CalibrationError(QGuardError, ValueError):
    """Calibration data violates a range or physical bound."""


class BackendError(QGuardError):
    """A backend adapter could not produce a result."""


class RecordingExhausted(BackendError):
    """A replay adapter ran out of recorded results."""


class OracleLimitError(QGuardError, ValueError):
    """The density-matrix oracle was asked for more qubits than it supports."""


class IntrospectionError(QGuardError):
    """Constraint evaluation failed; no callback was invoked.

    Carries the partial execution record (timestamps and constraint name);
    the underlying failure is chained as ``__cause__``.
    """

    def __init__(self, message: str, *, constraint_name: str, started_at, failed_at):
        super().__init__(message)
        self.constraint_name = constraint_name
        self.started_at = started_at
        self.failed_at = failed_at


class CallbackError(QGuardError):
    """A pass/fail callback raised after the branch decision was made.

    ``branch`` and ``introspection`` record the decision that was reached;
    the underlying failure is chained as ``__cause__``.
    """

    def __init__(self, message: str, *, branch, introspection, started_at, failed_at):
        super().__init__(message)
        self.branch = branch
        self.introspection = introspection
        self.started_at = started_at
        self.failed_at = failed_at
