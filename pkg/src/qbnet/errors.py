"""Exception hierarchy shared by every module."""


class QbnetError(Exception):
    """Base class for all library errors."""


class NetStructureError(QbnetError, ValueError):
    """A net or graph is malformed (unknown parents, duplicate names, ...)."""


class CycleDetected(NetStructureError):
    pass


class DimensionMismatch(QbnetError, ValueError):
    pass


class StoryCapExceeded(QbnetError):
    pass


class UnknownAxis(QbnetError, ValueError):
    pass


class EmptyResult(QbnetError, ValueError):
    pass


class ZeroProbability(QbnetError, ArithmeticError):
    pass


class ZeroDenominator(ZeroProbability):
    pass


class NotHermitian(QbnetError, ValueError):
    pass


class NotPsd(QbnetError, ValueError):
    pass


class NotNormalized(QbnetError, ValueError):
    pass


class NotUnitarizable(QbnetError, ArithmeticError):
    pass


class DomainError(QbnetError, ValueError):
    pass


class EmptyExpression(QbnetError, ValueError):
    pass


class EmptyGamma(QbnetError, ValueError):
    pass


class ExpressionSyntaxError(QbnetError, ValueError):
    """Malformed entropy expression; ``position`` is the 0-based offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class FileFormatError(QbnetError, ValueError):
    """Malformed input file; ``line`` is 1-based."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)
        self.line = line
        self.column = column
