# levy_sysid/exceptions.py
"""
Exception classes for levy-sysid.

This module defines the exception hierarchy used throughout the
identification pipeline. Every exception carries the structured values
that caused it plus a readable default message, and exposes the exit code
the command line interface reports for it.
"""
from typing import Any, Optional, Sequence


class LevySysIdError(Exception):
    """
    Base exception for all levy-sysid errors.

    All other exceptions inherit from this class, making it easy to catch
    every library error with a single except clause.
    """
    exit_code: int = 1


class ParameterDomainError(LevySysIdError):
    """
    Raised when a noise parameter lies outside its admissible domain.

    Typical causes:
    - a non-positive scale parameter (σ, ν, λ, C, G, M)
    - mixture weights outside (0, 1) or not summing to one
    - a CGMY index Y outside (0, 2) or inside the guard band around 1
    """
    exit_code = 2

    def __init__(self, parameter=None, value=None, reason=None, message=None):
        self.parameter = parameter
        self.value = value
        self.reason = reason

        if message:
            default_message = message
        elif parameter and reason:
            default_message = f"Parameter '{parameter}'={value!r} out of domain: {reason}"
        elif parameter:
            default_message = f"Parameter '{parameter}'={value!r} out of domain"
        else:
            default_message = "Parameter out of domain"

        super().__init__(default_message)


class StabilityError(LevySysIdError):
    """
    Raised when a polynomial of the system has roots outside the stability disk.

    Raised by simulate() for an unstable AR polynomial and by innovations()
    when either polynomial violates the margin.
    """
    exit_code = 2

    def __init__(
        self,
        polynomial: Optional[str] = None,
        root_moduli: Optional[Sequence[float]] = None,
        limit: Optional[float] = None,
        message: Optional[str] = None,
    ):
        self.polynomial = polynomial
        self.root_moduli = list(root_moduli) if root_moduli is not None else []
        self.limit = limit

        if message:
            default_message = message
        elif polynomial:
            moduli = ", ".join(f"{m:.6g}" for m in self.root_moduli)
            default_message = (
                f"{polynomial} polynomial is not stable: root moduli [{moduli}] "
                f"must be < {limit}"
            )
        else:
            default_message = "System is not stable"

        super().__init__(default_message)


class ConfigurationError(LevySysIdError):
    """
    Raised when settings are inconsistent with each other or with the data.

    Examples are a frequency grid smaller than the noise parameter vector,
    a stage-3 run on a system without parameters, or a sample too short
    for the requested burn-in.
    """
    exit_code = 2

    def __init__(self, setting=None, reason=None, message=None):
        self.setting = setting
        self.reason = reason

        if message:
            default_message = message
        elif setting and reason:
            default_message = f"Invalid configuration '{setting}': {reason}"
        elif setting:
            default_message = f"Invalid configuration: {setting}"
        else:
            default_message = "Invalid configuration"

        super().__init__(default_message)


class NumericalInstabilityError(LevySysIdError):
    """
    Raised when a quantity cannot be evaluated reliably.

    Raised for CGMY Y-derivatives near the poles of Γ(−Y) and for weighting
    matrices that are not positive definite.
    """
    exit_code = 2

    def __init__(self, quantity=None, reason=None, message=None):
        self.quantity = quantity
        self.reason = reason

        if message:
            default_message = message
        elif quantity and reason:
            default_message = f"Numerical instability in '{quantity}': {reason}"
        elif quantity:
            default_message = f"Numerical instability in '{quantity}'"
        else:
            default_message = "Numerical instability"

        super().__init__(default_message)


class UnsupportedOperationError(LevySysIdError):
    """Raised when a noise family does not provide the requested operation."""
    exit_code = 2

    def __init__(self, operation=None, kind=None, message=None):
        self.operation = operation
        self.kind = kind

        if message:
            default_message = message
        elif operation and kind:
            default_message = f"Operation '{operation}' is not supported for '{kind}'"
        else:
            default_message = "Unsupported operation"

        super().__init__(default_message)


class PipelineStageError(LevySysIdError):
    """
    Raised when one stage of the identification pipeline fails.

    Wraps the original exception and tags it with the stage name. The exit
    code follows the wrapped exception.
    """

    def __init__(self, stage: Optional[str] = None, cause: Optional[BaseException] = None,
                 message: Optional[str] = None):
        self.stage = stage
        self.cause = cause

        if message:
            default_message = message
        elif stage and cause is not None:
            default_message = f"Stage '{stage}' failed: {cause}"
        elif stage:
            default_message = f"Stage '{stage}' failed"
        else:
            default_message = "Pipeline stage failed"

        super().__init__(default_message)

    @property
    def exit_code(self) -> int:  # type: ignore[override]
        return getattr(self.cause, "exit_code", 1)


class InsufficientReplicationsError(LevySysIdError):
    """Raised when too few Monte Carlo replications succeed to emit a report."""
    exit_code = 3

    def __init__(self, succeeded=None, requested=None, required_fraction=None, message=None):
        self.succeeded = succeeded
        self.requested = requested
        self.required_fraction = required_fraction

        if message:
            default_message = message
        elif succeeded is not None and requested:
            default_message = (
                f"Only {succeeded}/{requested} replications succeeded "
                f"(required fraction {required_fraction})"
            )
        else:
            default_message = "Insufficient successful replications"

        super().__init__(default_message)


class ReportStorageError(LevySysIdError):
    """
    Raised when a report storage operation fails.

    This is a base class for more specific storage errors.
    """
    exit_code = 4


class ReportWriteError(ReportStorageError):
    """Raised when a report file cannot be written."""

    def __init__(self, path: Any = None, reason: Any = None, message: Optional[str] = None):
        self.path = path
        self.reason = reason

        if message:
            default_message = message
        elif path and reason:
            default_message = f"Cannot write report '{path}': {reason}"
        else:
            default_message = "Cannot write report"

        super().__init__(default_message)
