from __future__ import annotations

import bisect

from ..ir import Span


class ParseError(ValueError):
    """Positioned parse failure.

    ``kind`` classifies the failure: ``syntax`` for malformed input,
    ``unsupported`` for constructs outside the supported subset and
    ``unsupported-array-title`` for Puppet array titles.
    """

    def __init__(self, message: str, line: int = 0, column: int = 0, kind: str = "syntax"):
        self.message = message
        self.line = line
        self.column = column
        self.kind = kind
        super().__init__(f"{line}:{column}: {message} [{kind}]")


class SourceIndex:
    """Maps character offsets to 1-based line/column and UTF-8 byte offsets."""

    def __init__(self, text: str):
        self.text = text
        self._line_starts = [0]
        for i, ch in enumerate(text):
            if ch == "\n":
                self._line_starts.append(i + 1)
        self._ascii = text.isascii()
        if not self._ascii:
            self._byte_at = [0] * (len(text) + 1)
            total = 0
            for i, ch in enumerate(text):
                self._byte_at[i] = total
                total += len(ch.encode("utf-8"))
            self._byte_at[len(text)] = total

    def byte(self, offset: int) -> int:
        return offset if self._ascii else self._byte_at[offset]

    def line_col(self, offset: int) -> tuple[int, int]:
        line = bisect.bisect_right(self._line_starts, offset) - 1
        return line + 1, offset - self._line_starts[line] + 1

    def span(self, start: int, end: int) -> Span:
        l1, c1 = self.line_col(start)
        l2, c2 = self.line_col(end)
        return Span(l1, c1, l2, c2, self.byte(start), self.byte(end))

    def char_offset(self, byte_offset: int) -> int:
        if self._ascii:
            return byte_offset
        return bisect.bisect_left(self._byte_at, byte_offset)

    def line_start(self, offset: int) -> int:
        return self._line_starts[bisect.bisect_right(self._line_starts, offset) - 1]

    def error(self, message: str, offset: int, kind: str = "syntax") -> ParseError:
        line, col = self.line_col(min(offset, len(self.text)))
        return ParseError(message, line, col, kind)
