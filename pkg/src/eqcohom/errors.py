"""Exception hierarchy shared by every layer of the package."""

from __future__ import annotations


class EqcohomError(Exception):
    """Base class. ``exit_code`` is what the CLI returns for it."""

    exit_code = 1


class ValidationError(EqcohomError, ValueError):
    """Input data does not describe a valid object (group, action, module, document)."""

    exit_code = 2

    def __init__(self, message: str, path: str | None = None):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class CapExceeded(EqcohomError):
    """A configured size cap would be exceeded; nothing is truncated silently."""

    exit_code = 3


class NotAComplexError(EqcohomError):
    """Composition of consecutive differentials is nonzero."""


class PreconditionError(EqcohomError):
    """An operation's mathematical precondition does not hold for the input."""


class ImproperSequenceError(PreconditionError):
    """A short exact sequence has no Gamma-equivariant set-level section."""
