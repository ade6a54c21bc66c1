"""
Error handling utilities for the matrix-mech toolkit.
"""

import logging
import os
import traceback
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional


class MechanismError(Exception):
    """Base exception for matrix-mech errors."""

    def __init__(self, message: str, error_code: Optional[str] = None,
                 context: Optional[Dict[str, Any]] = None) -> None:
        super().__init__(message)
        self.message = message
        self.error_code = error_code or 'MECHANISM_ERROR'
        self.context = context or {}


class ScenarioError(MechanismError):
    """Scenario file or table failed validation."""

    def __init__(self, message: str, error_code: Optional[str] = None,
                 context: Optional[Dict[str, Any]] = None) -> None:
        super().__init__(message, error_code or 'INVALID_SCENARIO', context)


class ScenarioParseError(ScenarioError):
    """Malformed line, unknown section or unknown key."""

    def __init__(self, message: str, line_number: Optional[int] = None,
                 context: Optional[Dict[str, Any]] = None) -> None:
        context = dict(context or {})
        if line_number is not None:
            context['line'] = line_number
            message = f"line {line_number}: {message}"
        super().__init__(message, 'PARSE_ERROR', context)


class MissingTableEntry(ScenarioError):
    """A valuation or transition cell is absent."""

    def __init__(self, message: str, context: Optional[Dict[str, Any]] = None) -> None:
        super().__init__(message, 'MISSING_TABLE_ENTRY', context)


class RowNotStochastic(ScenarioError):
    """A transition row has entries outside [0, 1] or does not sum to 1."""

    def __init__(self, message: str, context: Optional[Dict[str, Any]] = None) -> None:
        super().__init__(message, 'ROW_NOT_STOCHASTIC', context)


class DiscountOutOfRange(ScenarioError):
    """Discount factor outside the open interval (0, 1)."""

    def __init__(self, message: str, context: Optional[Dict[str, Any]] = None) -> None:
        super().__init__(message, 'DISCOUNT_OUT_OF_RANGE', context)


class NonZeroOutsideAllocation(ScenarioError):
    """A valuation was declared for an agent that is not in the allocation."""

    def __init__(self, message: str, context: Optional[Dict[str, Any]] = None) -> None:
        super().__init__(message, 'NONZERO_OUTSIDE_ALLOCATION', context)


class BoundViolation(ScenarioError):
    """A user-supplied valuation bound is exceeded by the table."""

    def __init__(self, message: str, context: Optional[Dict[str, Any]] = None) -> None:
        super().__init__(message, 'BOUND_VIOLATION', context)


class UnsupportedScenario(ScenarioError):
    """Scenario exceeds the desk-scale limits."""

    def __init__(self, message: str, context: Optional[Dict[str, Any]] = None) -> None:
        super().__init__(message, 'UNSUPPORTED_SCENARIO', context)


class SolverError(MechanismError):
    """Error while solving a welfare MDP."""
    pass


class NonConvergence(SolverError):
    """Iteration cap reached before the stopping rule was met."""

    def __init__(self, message: str, context: Optional[Dict[str, Any]] = None) -> None:
        super().__init__(message, 'NON_CONVERGENCE', context)


class StrategyDomainError(MechanismError):
    """A strategy reported a type outside the agent's type space."""

    def __init__(self, message: str, context: Optional[Dict[str, Any]] = None) -> None:
        super().__init__(message, 'STRATEGY_DOMAIN', context)


class SearchBudgetExhausted(MechanismError):
    """Counterexample search ran out of instances; the config is too narrow."""

    def __init__(self, message: str, context: Optional[Dict[str, Any]] = None) -> None:
        super().__init__(message, 'SEARCH_BUDGET_EXHAUSTED', context)


class ReportError(MechanismError):
    """Error while reading or writing a report file."""
    pass


class ErrorSeverity(Enum):
    """Error severity levels."""
    CRITICAL = "CRITICAL"
    HIGH = "HIGH"
    MEDIUM = "MEDIUM"


class ErrorHandler:
    """Collect errors per scenario so a suite run can continue past bad files."""

    def __init__(self, logger: Optional[logging.Logger] = None) -> None:
        self.logger = logger
        self.errors: List[Dict[str, Any]] = []
        self.warnings: List[Dict[str, Any]] = []

    def handle_error(self, error: Exception, severity: ErrorSeverity = ErrorSeverity.HIGH,
                     context: Optional[Dict[str, Any]] = None) -> None:
        """Record an error and log it at a level matching its severity."""

        error_record = {
            'type': type(error).__name__,
            'message': str(error),
            'severity': severity.value,
            'context': dict(context or {}),
            'error_code': getattr(error, 'error_code', 'UNEXPECTED'),
            'traceback': traceback.format_exc() if severity == ErrorSeverity.CRITICAL else None,
        }

        if isinstance(error, MechanismError):
            error_record['context'].update(error.context)

        if severity in (ErrorSeverity.CRITICAL, ErrorSeverity.HIGH):
            self.errors.append(error_record)
        else:
            self.warnings.append(error_record)

        if self.logger:
            if severity == ErrorSeverity.CRITICAL:
                self.logger.critical(f"CRITICAL ERROR: {error}")
            elif severity == ErrorSeverity.HIGH:
                self.logger.error(f"ERROR: {error}")
            else:
                self.logger.warning(f"WARNING: {error}")

    def add_warning(self, message: str, context: Optional[Dict[str, Any]] = None) -> None:
        """Add a warning without raising an exception."""

        self.warnings.append({
            'type': 'Warning',
            'message': message,
            'severity': ErrorSeverity.MEDIUM.value,
            'context': dict(context or {}),
            'error_code': 'WARNING',
        })

        if self.logger:
            self.logger.warning(f"WARNING: {message}")

    def has_errors(self) -> bool:
        return bool(self.errors)

    def error_codes(self) -> List[str]:
        return [e['error_code'] for e in self.errors]

    def get_error_summary(self) -> Dict[str, Any]:
        """Summary of all errors and warnings grouped by type."""

        by_type: Dict[str, List[Dict[str, Any]]] = {}
        for issue in self.errors + self.warnings:
            by_type.setdefault(issue['type'], []).append(issue)

        return {
            'total_errors': len(self.errors),
            'total_warnings': len(self.warnings),
            'by_type': by_type,
            'has_critical_errors': any(e['severity'] == 'CRITICAL' for e in self.errors),
        }

    def generate_error_report(self) -> str:
        """Human-readable error report."""

        if not self.errors and not self.warnings:
            return "✅ No errors or warnings detected."

        lines = ["Error Summary Report", "=" * 50]

        if self.errors:
            lines.append(f"\n❌ Errors ({len(self.errors)}):")
            for i, error in enumerate(self.errors, 1):
                lines.append(f"{i}. [{error['error_code']}] {error['message']}")
                for key, value in error['context'].items():
                    lines.append(f"   {key}: {value}")

        if self.warnings:
            lines.append(f"\n⚠️  Warnings ({len(self.warnings)}):")
            for i, warning in enumerate(self.warnings, 1):
                lines.append(f"{i}. {warning['message']}")

        return "\n".join(lines)


def validate_input_path(file_path: str) -> None:
    """
    Validate that a scenario file exists and is readable.

    Raises:
        ScenarioError: If file validation fails
    """

    if not os.path.exists(file_path):
        raise ScenarioError(
            f"Input file does not exist: {file_path}",
            error_code="FILE_NOT_FOUND",
            context={'file_path': file_path}
        )

    if not os.path.isfile(file_path):
        raise ScenarioError(
            f"Path is not a file: {file_path}",
            error_code="NOT_A_FILE",
            context={'file_path': file_path}
        )

    if not os.access(file_path, os.R_OK):
        raise ScenarioError(
            f"File is not readable: {file_path}",
            error_code="FILE_NOT_READABLE",
            context={'file_path': file_path}
        )


def validate_output_dir(output_dir: str) -> Path:
    """
    Create the output directory if needed and check it is writable.

    Raises:
        ReportError: If the directory cannot be used
    """

    path = Path(output_dir)

    if not path.exists():
        try:
            path.mkdir(parents=True, exist_ok=True)
        except OSError:
            raise ReportError(
                f"Cannot create output directory: {path}",
                error_code="OUTPUT_DIR_NOT_CREATABLE",
                context={'output_dir': str(path)}
            )

    if not os.access(path, os.W_OK):
        raise ReportError(
            f"Output directory is not writable: {path}",
            error_code="OUTPUT_DIR_NOT_WRITABLE",
            context={'output_dir': str(path)}
        )

    return path
