"""Small scanner shared by the group and subgroup spec parsers."""

import re
from fractions import Fraction
from typing import List, Optional, Pattern

from .errors import SpecParseError

_INTEGER = re.compile(r"[+-]?\d+")
_RATIONAL = re.compile(r"([+-]?\d+)(?:\s*/\s*(\d+))?")


class SpecScanner:
    """Cursor over a spec string; errors carry UTF-8 byte offsets."""

    def __init__(self, text: str) -> None:
        self.text = text
        self.pos = 0

    def byte_offset(self, pos: Optional[int] = None) -> int:
        index = self.pos if pos is None else pos
        return len(self.text[:index].encode("utf-8"))

    def error(self, message: str, pos: Optional[int] = None) -> SpecParseError:
        return SpecParseError(message, self.text, self.byte_offset(pos))

    def skip_space(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def at_end(self) -> bool:
        self.skip_space()
        return self.pos >= len(self.text)

    def accept(self, literal: str) -> bool:
        self.skip_space()
        if self.text.startswith(literal, self.pos):
            self.pos += len(literal)
            return True
        return False

    def expect(self, literal: str) -> None:
        if not self.accept(literal):
            raise self.error(f"expected {literal!r}")

    def match(self, pattern: Pattern[str]) -> Optional["re.Match[str]"]:
        self.skip_space()
        found = pattern.match(self.text, self.pos)
        if found:
            self.pos = found.end()
        return found

    def integer(self) -> int:
        found = self.match(_INTEGER)
        if not found:
            raise self.error("expected an integer")
        return int(found.group(0))

    def rational(self) -> Fraction:
        start = self.pos
        found = self.match(_RATIONAL)
        if not found:
            raise self.error("expected a rational number")
        numerator = int(found.group(1))
        if found.group(2) is None:
            return Fraction(numerator)
        denominator = int(found.group(2))
        if denominator == 0:
            raise self.error("zero denominator", start)
        return Fraction(numerator, denominator)

    def rational_list(self) -> List[Fraction]:
        values = [self.rational()]
        while self.accept(","):
            values.append(self.rational())
        return values

    def finish(self) -> None:
        if not self.at_end():
            raise self.error("unexpected trailing input")
