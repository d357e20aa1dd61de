"""Exception hierarchy for isoformal.

Input problems subclass ValueError so callers that only care about "bad
input" can catch that; resource limits and unsupported cases do not.
"""

from typing import Optional


class IsoformalError(Exception):
    """Base class for every error raised by this package."""


class SpecParseError(IsoformalError, ValueError):
    """A group, subgroup or corpus spec string failed to parse.

    ``offset`` is a byte offset into the UTF-8 encoding of ``text``.
    """

    def __init__(self, message: str, text: str, offset: int) -> None:
        self.message = message
        self.text = text
        self.offset = offset
        super().__init__(f"{message} (at byte {offset} of {text!r})")

    def caret(self) -> str:
        """Render the input with a caret under the offending byte."""
        prefix = self.text.encode("utf-8")[: self.offset].decode("utf-8", "replace")
        return f"{self.text}\n{' ' * len(prefix)}^"


class RootSystemError(IsoformalError, ValueError):
    """Invalid rank for a type, a vector that is not a root, a bad vector."""


class PairError(IsoformalError, ValueError):
    """The subgroup spec does not describe a corank-one subtorus of G."""


class CohomologyError(IsoformalError, ValueError):
    """A supplied W_H does not preserve the restricted invariants."""


class ConfigError(IsoformalError, ValueError):
    """Configuration file could not be read or validated."""


class CorpusError(IsoformalError, ValueError):
    """A corpus file line could not be parsed into a row."""


class GroupTooLargeError(IsoformalError):
    """A Weyl group enumeration would exceed the configured cap."""

    def __init__(self, what: str, order: int, cap: int) -> None:
        self.what = what
        self.order = order
        self.cap = cap
        super().__init__(
            f"group too large: {what} has order {order}, exceeding the cap of {cap}"
        )


class DegreeCapError(IsoformalError):
    """A graded quotient did not vanish before the degree cap."""

    def __init__(self, cap: int, detail: Optional[str] = None) -> None:
        self.cap = cap
        message = f"graded quotient still nonzero at the degree cap {cap}"
        if detail:
            message += f": {detail}"
        super().__init__(message)


class UnsupportedError(IsoformalError):
    """The input is valid but outside what the cohomology engine handles."""


class ConsistencyError(IsoformalError):
    """Two independent computations disagreed."""
