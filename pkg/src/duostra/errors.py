"""Exception hierarchy."""

from __future__ import annotations


class DuostraError(Exception):
    """Base class for all package errors."""


class QasmParseError(DuostraError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CircuitValidationError(DuostraError, ValueError):
    pass


class UnsupportedGateError(CircuitValidationError):
    pass


class DeviceValidationError(DuostraError, ValueError):
    pass


class CapacityError(DuostraError, ValueError):
    """The circuit needs more qubits than the device has."""


class ContractViolation(DuostraError, ValueError):
    """A caller broke an operation's precondition."""


class StalePlanError(DuostraError, RuntimeError):
    """A routing plan no longer matches the state it is applied to."""


class RoutingError(DuostraError, RuntimeError):
    pass
