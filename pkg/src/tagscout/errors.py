"""Exception types shared across the workbench."""


class TagscoutError(Exception):
    """Base class for all workbench errors."""


class TransportError(TagscoutError):
    """A network/backend call failed after any allowed retries."""


class ConfigError(TagscoutError):
    """Bad configuration or a non-retryable client-side API error (4xx)."""


class PayloadParseError(TagscoutError):
    """An upstream API payload could not be interpreted.

    ``element_id`` names the offending element when known.
    """

    def __init__(self, message: str, element_id=None):
        if element_id is not None:
            message = f"{message} (element {element_id})"
        super().__init__(message)
        self.element_id = element_id


class NotFoundError(TagscoutError):
    """A requested upstream or stored resource does not exist."""


class ValidationError(TagscoutError):
    """Input failed validation. ``fields`` lists the offending field names."""

    def __init__(self, message: str, fields=()):
        super().__init__(message)
        self.fields = list(fields)


class DuplicateError(TagscoutError):
    """A uniqueness constraint (e.g. one annotation per road+analyst) was hit."""


class PreconditionError(TagscoutError):
    """An operation was invoked with its preconditions unmet."""


class NoCoverageError(TagscoutError):
    """No street-level image lies within the matching radius of a road."""


class DegenerateGeometryError(TagscoutError):
    """A polyline with fewer than two vertices was passed to a geometry op."""
