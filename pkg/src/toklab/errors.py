"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: validation failures exit 2,
missing files/resources exit 3.
"""


class ToklabError(Exception):
    """Base class for all package errors."""


class ValidationError(ToklabError):
    """Input violates a documented contract (bad policy, malformed item, ...)."""


class ConventionError(ValidationError):
    """Token string is malformed under its vocabulary's marker convention."""


class CollisionError(ValidationError):
    """Canonicalization collapsed distinct tokens of one vocabulary."""

    def __init__(self, message, collisions):
        super().__init__(message)
        self.collisions = list(collisions)


class AlignmentError(ValidationError):
    """Parallel corpora are not aligned line-by-line."""


class ResourceError(ToklabError):
    """A required data resource (mapping table, rule file) is missing."""


class UnknownTokenError(ToklabError):
    """Encoder hit a code point it cannot represent and fallback is disabled."""


class UncoverableError(UnknownTokenError):
    """No sequence of vocabulary tokens covers the segment."""


class UndefinedMetricError(ToklabError):
    """Metric has no defined value (zero words, empty group, zero accuracy)."""


class InsufficientDataError(ToklabError):
    """Too few usable observations for a statistical test."""
