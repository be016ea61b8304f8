"""Exception hierarchy shared across the package."""

from __future__ import annotations


class WidgetForgeError(Exception):
    """Base class for all package errors."""


class ConfigurationError(WidgetForgeError):
    """Raised when embedded configuration is missing or malformed."""

    def __init__(self, field: str, message: str):
        super().__init__(f"configuration error in {field!r}: {message}")
        self.field = field


class AuthenticationError(WidgetForgeError):
    """Monitoring API rejected the bearer token."""


class CatalogFetchError(WidgetForgeError):
    """One or more entity endpoints failed.

    ``partial`` carries a catalog built from the endpoints that succeeded;
    ``failed_endpoints`` names the ones that did not.
    """

    def __init__(self, failed_endpoints: list[str], partial=None):
        super().__init__(f"entity fetch failed for: {', '.join(failed_endpoints)}")
        self.failed_endpoints = failed_endpoints
        self.partial = partial


class TransportError(WidgetForgeError):
    """LLM or embedding backend unreachable after retries."""

    def __init__(self, message: str, retries: int = 0):
        super().__init__(message)
        self.retries = retries


class FixtureMissError(TransportError):
    """Replay fixture has no entry for the requested message."""

    def __init__(self, user_message: str):
        super().__init__(f"no replay fixture entry for message: {user_message!r}")
        self.user_message = user_message


class ParseError(WidgetForgeError):
    """Model output could not be parsed as JSON, even after the reprompt."""

    def __init__(self, message: str, raw_text: str = ""):
        super().__init__(message)
        self.raw_text = raw_text


class FieldValidationError(WidgetForgeError):
    """A parsed value violates a closed vocabulary or a structural rule."""

    def __init__(self, field: str, value, message: str | None = None):
        detail = message or f"value {value!r} not allowed for field {field!r}"
        super().__init__(detail)
        self.field = field
        self.value = value


class DomainUnavailableError(WidgetForgeError):
    """Resolution was attempted against an empty candidate domain."""

    def __init__(self, field_path: str):
        super().__init__(f"no candidate domain available for {field_path!r} (catalog never fetched?)")
        self.field_path = field_path


class NoOptionsError(WidgetForgeError):
    """The referenced field cannot be completed from any known option set."""

    def __init__(self, field_path: str):
        super().__init__(f"no completion options exist for {field_path!r}")
        self.field_path = field_path


class PhaseError(WidgetForgeError):
    """Session operation invoked in the wrong phase."""

    def __init__(self, expected: str, actual: str):
        super().__init__(f"operation requires phase {expected}, session is in {actual}")
        self.expected = expected
        self.actual = actual


class InvalidChoiceError(WidgetForgeError):
    """Clarification answer is not one of the offered options."""

    def __init__(self, choice: str, options):
        super().__init__(f"choice {choice!r} is not among the offered options")
        self.choice = choice
        self.options = list(options)


class OrderingError(WidgetForgeError):
    """Clarification answered out of queue order."""


class ContractError(WidgetForgeError):
    """Draft handed to the schema builder violates previewable invariants."""

    def __init__(self, violations: list[str]):
        super().__init__("draft violates: " + "; ".join(violations))
        self.violations = violations


class DatasetError(WidgetForgeError):
    """Evaluation dataset record failed validation."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class ComparisonError(WidgetForgeError):
    """Reports cannot be compared (different datasets)."""


class StoreCapacityError(WidgetForgeError):
    """Session store is at its configured capacity."""
