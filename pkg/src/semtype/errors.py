"""Exception hierarchy shared across the package.

Every error carries a short machine-readable ``code`` so the HTTP layer and
the CLI can map failures without string matching.
"""

from __future__ import annotations


class SemtypeError(Exception):
    """Base class for all package errors."""

    code = "error"

    def __init__(self, message: str, detail: dict | None = None):
        super().__init__(message)
        self.message = message
        self.detail = detail or {}


class ParseError(SemtypeError):
    """Malformed input file (CSV, ontology, embeddings, logs)."""

    code = "parse_error"

    def __init__(self, message: str, *, line: int | None = None, offset: int | None = None):
        detail = {}
        if line is not None:
            detail["line"] = line
        if offset is not None:
            detail["offset"] = offset
        super().__init__(message, detail)
        self.line = line
        self.offset = offset


class ValidationError(SemtypeError):
    """Input is well-formed but violates a contract."""

    code = "validation_error"


class ConflictError(SemtypeError):
    """Duplicate identifier where uniqueness is required."""

    code = "conflict"


class NotFoundError(SemtypeError):
    """Referenced entity does not exist."""

    code = "not_found"


class ConfigurationError(SemtypeError):
    """Inconsistent registry or configuration state."""

    code = "configuration_error"


class StateError(SemtypeError):
    """Persisted or in-memory model state is unusable."""

    code = "state_error"


class TrainingError(SemtypeError):
    """Classifier training could not run."""

    code = "training_error"


class DivergenceError(TrainingError):
    """Training produced a non-finite loss."""

    code = "divergence"

    def __init__(self, message: str, *, epoch: int):
        super().__init__(message, {"epoch": epoch})
        self.epoch = epoch
