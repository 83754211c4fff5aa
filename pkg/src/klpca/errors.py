"""Exception hierarchy shared by all modules."""


class KlpcaError(Exception):
    """Base class for library errors."""


class InvalidInput(KlpcaError, ValueError):
    pass


class InvalidState(KlpcaError, ValueError):
    pass


class NoConvergence(KlpcaError, RuntimeError):
    pass


class DegenerateStart(KlpcaError, ValueError):
    """Power iteration start vector has no component in the range of G."""


class SpectralGapTooSmall(KlpcaError, RuntimeError):
    pass


class NotPositiveDefinite(KlpcaError, ValueError):
    pass


class ParseError(KlpcaError, ValueError):
    def __init__(self, message, line=None, offset=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if offset is not None:
            where.append(f"byte {offset}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.line = line
        self.offset = offset


class UsageError(KlpcaError, ValueError):
    pass
