"""Exception hierarchy shared across the package.

The CLI maps these classes onto exit codes, so new error conditions should
reuse an existing class (or subclass one) rather than raising bare built-ins.
"""

from __future__ import annotations


class StlObsError(Exception):
    """Base class for all errors raised by this package."""


class FlagConflictError(StlObsError):
    """Both the positive and the negative verdict flag are set.

    This is an internal-consistency failure: a correct observer network can
    never assert and refute the same property.
    """


class FormulaError(StlObsError):
    """Base class for problems with a formula (text or AST)."""


class FormulaSyntaxError(FormulaError):
    """Malformed formula text."""

    def __init__(self, message: str, column: int | None = None):
        self.column = column
        if column is not None:
            message = f"{message} (column {column})"
        super().__init__(message)


class UnknownSignalError(FormulaSyntaxError):
    """The formula references a signal that was not declared."""

    def __init__(self, name: str, column: int | None = None):
        self.name = name
        super().__init__(f"unknown signal '{name}'", column)


class IntervalBoundError(FormulaSyntaxError):
    """Interval bounds are not integers, negative, or not strictly ordered."""


class NestedOperatorError(FormulaSyntaxError):
    """A temporal operator occurs inside another temporal operator."""

    def __init__(self, outer: str, inner: str, column: int | None = None):
        self.outer = outer
        self.inner = inner
        super().__init__(
            f"temporal operator {inner} nested inside {outer}; "
            "operands must be signal predicates",
            column,
        )


class InvalidFormulaError(FormulaError):
    """An AST handed to the compiler failed validation."""

    def __init__(self, violations):
        self.violations = tuple(violations)
        lines = "; ".join(f"{v.path or '(root)'}: {v.message}" for v in self.violations)
        super().__init__(f"invalid formula: {lines}")


class TraceError(StlObsError):
    """Base class for trace-data problems."""


class TraceFormatError(TraceError):
    """Malformed trace input (bad CSV/JSONL shape or cell contents)."""


class ShortTraceError(TraceError):
    """The trace does not extend far enough for the requested evaluation."""


class MissingSignalError(TraceError):
    """A sample lacks a value for a signal the consumer needs."""

    def __init__(self, names, context: str = ""):
        self.names = tuple(names)
        where = f" {context}" if context else ""
        super().__init__(f"missing signal value(s){where}: {', '.join(self.names)}")


class EnumerationCapError(StlObsError):
    """An exhaustive enumeration would exceed the configured cap."""


class CheckerError(StlObsError):
    """The external proof checker failed in a way we cannot interpret."""
