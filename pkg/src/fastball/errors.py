"""Exception types raised across the package."""


class FastballError(Exception):
    """Base class for all package errors."""


class InvalidIndex(FastballError, IndexError):
    pass


class DuplicateEdge(FastballError, ValueError):
    pass


class InvalidEntry(FastballError, ValueError):
    pass


class TooLarge(FastballError, ValueError):
    pass


class UnsortedInput(FastballError, ValueError):
    pass


class VictoryVectorMismatch(FastballError, ValueError):
    pass


class TooFewTopNodes(FastballError, ValueError):
    pass


class InvalidParameter(FastballError, ValueError):
    pass


class DegreeMismatch(FastballError, ValueError):
    pass


class ParseError(FastballError, ValueError):
    """Malformed input file; carries the 1-based line number."""

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"line {line}: "
        elif where:
            where += " "
        super().__init__(where + message)
