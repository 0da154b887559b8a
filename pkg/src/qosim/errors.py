"""Exception types raised throughout the package."""

from __future__ import annotations


class IncompatibleBasesError(ValueError):
    """Two quantum objects were combined whose bases do not match."""

    def __init__(self, message: str, left=None, right=None):
        super().__init__(message)
        self.left = left
        self.right = right


class DegenerateStateError(ValueError):
    """A state with zero norm was normalized."""


class IntegrationError(RuntimeError):
    """The adaptive integrator could not advance.

    Attributes:
        last_time: The last time successfully reached before the failure.
    """

    def __init__(self, message: str, last_time: float):
        super().__init__(f"{message} (last good t = {last_time!r})")
        self.last_time = last_time


class DegenerateJumpError(RuntimeError):
    """A quantum jump was triggered but every jump channel has zero weight."""


def check_bases(expected, got, what: str) -> None:
    """Raise :class:`IncompatibleBasesError` unless ``expected == got``.

    ``what`` names the side of the operation that failed and is put into the
    message verbatim.
    """
    if expected is got or expected == got:
        return
    raise IncompatibleBasesError(
        f"incompatible bases ({what}): {expected!r} vs {got!r}", expected, got
    )
