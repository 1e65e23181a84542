"""Exception hierarchy shared by every module."""


class SquareComplexError(Exception):
    """Base class for all errors raised by squarecx."""


class InputError(SquareComplexError):
    """Malformed or inconsistent input data."""


class DanglingReference(InputError):
    pass


class BadWalk(InputError):
    pass


class DuplicateSquare(InputError):
    pass


class UnknownVertex(InputError, KeyError):
    pass


class ParseError(InputError):
    pass


class Disconnected(SquareComplexError):
    pass


class CapExceeded(SquareComplexError):
    def __init__(self, message, partial_count=None):
        super().__init__(message)
        self.partial_count = partial_count


class TooLarge(CapExceeded):
    pass


class MismatchBug(SquareComplexError):
    pass


class EmbedFail(SquareComplexError):
    pass


class TopologyBug(SquareComplexError):
    pass


class NotEuclideanBug(SquareComplexError):
    pass


class DegenerateDiagram(SquareComplexError):
    pass


class NotReduced(SquareComplexError):
    pass


class TargetInconsistent(SquareComplexError):
    pass


class NotFound(SquareComplexError):
    def __init__(self, message, margin=None):
        super().__init__(message)
        self.margin = margin


class NotGeodesicBottom(InputError):
    pass


class InconsistentFold(SquareComplexError):
    pass


class EmptyOverlap(SquareComplexError):
    pass


class NotAutomorphism(InputError):
    pass


class OutOfTruncation(SquareComplexError):
    pass


class AxisTooShort(SquareComplexError):
    pass


class TooFewCorners(InputError):
    pass


class MapsDisagreeOnBase(InputError):
    pass


class BadSymbol(InputError):
    pass


class BadLocalData(InputError):
    pass


class BadPolygon(InputError):
    pass


class NoLayout(SquareComplexError):
    pass


class NotSeparatingWarning(UserWarning):
    """A hyperplane does not split its component in two (input is not CAT(0))."""
