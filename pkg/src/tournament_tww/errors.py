"""Exception hierarchy shared by every module of the package."""


class TwwError(Exception):
    """Base class for all errors raised by this package."""


class InputError(TwwError):
    """Malformed or inconsistent input."""


class LoopError(InputError):
    pass


class DigonError(InputError):
    pass


class MissingArcError(InputError):
    pass


class OutOfRangeError(InputError):
    pass


class ParseError(InputError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class KindMismatch(InputError):
    pass


class SizeLimitError(TwwError):
    """An exhaustive routine was asked to run beyond its configured cap."""

    def __init__(self, what: str, size: int, cap: int):
        self.size = size
        self.cap = cap
        super().__init__(f"{what}: size {size} exceeds cap {cap}")


class NotAChain(TwwError):
    pass


class WrongEnumeration(TwwError):
    pass


class NotALeaf(TwwError):
    pass


class TooSmall(InputError):
    pass


class DivisionShape(InputError):
    pass


class InvalidFamily(InputError):
    pass


class BudgetUnderflow(TwwError):
    def __init__(self, have: int, need: int, k: int):
        self.have = have
        self.need = need
        self.k = k
        super().__init__(
            f"family has {have} parts but budget({k}) requires {need}"
        )


class InvalidMerge(InputError):
    pass


class Overlap(InputError):
    pass


class FreeVariable(TwwError):
    pass


class UnknownSymbol(TwwError):
    pass


class NotInImage(TwwError):
    """A tournament is not an extended obstruction of the requested kind."""
