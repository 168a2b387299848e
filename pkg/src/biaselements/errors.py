"""Exception types shared across the toolkit.

Class names double as stable error codes: the HTTP service and the CLI
report ``type(exc).__name__`` verbatim, so renaming a class here is a
wire-format change.
"""


class ToolkitError(Exception):
    """Base class for every error raised by this package."""


class ParseError(ToolkitError):
    """Input bytes are not well-formed for the expected format."""


class ValidationError(ToolkitError):
    """A structural invariant is violated; message names the first failing rule."""

    def __init__(self, rule: str, message: str):
        super().__init__(f"{rule}: {message}")
        self.rule = rule


class DomainError(ToolkitError):
    """An argument is outside the operation's domain (e.g. percentage <= 0)."""


class NotFound(ToolkitError):
    """A referenced id does not exist."""


# corpus / merge
class NonContiguous(ToolkitError):
    """Units selected for merging are not an adjacent run."""


class CrossDocument(ToolkitError):
    """Units selected for merging belong to different documents."""


class ConflictingLabels(ToolkitError):
    """Units selected for merging carry disagreeing annotations."""


# annotation store
class UnknownUnit(ToolkitError):
    """Annotation targets a unit id absent from the corpus."""


class UnknownType(ToolkitError):
    """A label or verdict references a type id absent from the taxonomy."""


class StaleTaxonomyVersion(ToolkitError):
    """Record was produced against a different taxonomy version than the corpus uses."""


class NoRecords(ToolkitError):
    """Consensus requested for a unit with no annotation records."""


class NoOverlap(ToolkitError):
    """Agreement requested for two annotators with no commonly labeled units."""


# reports / layout
class IncompleteReport(ToolkitError):
    """Prevalence report does not cover every taxonomy type."""


class WrongCount(ToolkitError):
    """Layout input does not contain exactly the expected number of distinct ids."""


# classifier harness
class MalformedResponse(ToolkitError):
    """Classifier backend returned bytes that do not parse as a verdict."""


class ConfidenceOutOfRange(ToolkitError):
    """A verdict confidence is outside [0, 1]."""


class BackendUnavailable(ToolkitError):
    """Remote backend failed after the configured number of retries."""


class UnknownDocument(ToolkitError):
    """Classification requested for a document id absent from the corpus."""
