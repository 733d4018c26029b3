"""Exception hierarchy shared by all modules."""


class LKMError(Exception):
    """Base class for every error raised by lkm3."""


class ExponentError(LKMError, ValueError):
    """An exponent left the lattice (1/24)Z x (1/2)Z."""


class ZeroSeries(LKMError, ZeroDivisionError):
    pass


class OutOfTruncation(LKMError):
    """A coefficient was requested at or beyond the known precision."""


class InsufficientTruncation(LKMError):
    pass


class ConstructionFailed(LKMError):
    pass


class SolveFailed(LKMError):
    pass


class IndexMismatch(LKMError, ValueError):
    pass


class WeightMismatch(LKMError, ValueError):
    pass


class SchemaError(LKMError, ValueError):
    def __init__(self, message, location=""):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class MismatchAgainstPaper(LKMError):
    def __init__(self, message, t=None, label=None, position=None, expected=None, got=None):
        self.t, self.label, self.position = t, label, position
        self.expected, self.got = expected, got
        super().__init__(message)


class NotARoot(LKMError, ValueError):
    pass


class NonPrimitive(LKMError, ValueError):
    pass


class DepthExceeded(LKMError):
    pass


class NoMatch(LKMError):
    def __init__(self, message, computed=None, expected=None):
        self.computed, self.expected = computed, expected
        super().__init__(message)
