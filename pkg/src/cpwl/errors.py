"""Exception hierarchy shared by every cpwl module."""


class CpwlError(Exception):
    """Base class for all errors raised by this package."""


class UnknownFunction(CpwlError, KeyError):
    def __str__(self):
        return f"unknown function {self.args[0]!r}"


class ExpressionError(CpwlError, ValueError):
    """Malformed or unsupported expression source.

    ``offset`` is the byte offset into the UTF-8 encoded source.
    """

    def __init__(self, message, offset):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class ExpressionSyntaxError(ExpressionError):
    pass


class UnknownIdentifier(ExpressionError):
    pass


class EvaluationError(CpwlError, ArithmeticError):
    """A function produced a non-finite value where a finite one is required."""


class QuadratureNoConvergence(CpwlError, ArithmeticError):
    def __init__(self, message, partial):
        super().__init__(message)
        self.partial = partial


class InvalidDensity(CpwlError, ValueError):
    pass


class InvalidInterval(CpwlError, ValueError):
    pass


class InvalidPartition(CpwlError, ValueError):
    pass


class SingularSystem(CpwlError, ArithmeticError):
    pass


class OutOfDomain(CpwlError, ValueError):
    def __init__(self, x, a, b):
        super().__init__(f"x={x!r} outside domain [{a!r}, {b!r}]")
        self.x = x


class TableFormatError(CpwlError, ValueError):
    pass


class BadMagic(TableFormatError):
    pass


class UnsupportedVersion(TableFormatError):
    pass


class CorruptTable(TableFormatError):
    pass
