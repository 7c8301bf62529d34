"""Error types shared across the toolkit.

The CLI maps these onto process exit codes: usage problems exit 2,
capacity problems exit 3, anything else exits 1.
"""


class CircleKitError(Exception):
    """Base class for all toolkit errors."""


class CapacityError(CircleKitError):
    """A computation needs more sieved range (or memory) than is available.

    The message always names the limit that would have been required, so a
    caller can rebuild tables at the right size and retry.
    """

    def __init__(self, message: str, required_limit: int | None = None):
        super().__init__(message)
        self.required_limit = required_limit
