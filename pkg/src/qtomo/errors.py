"""Exception hierarchy for qtomo."""


class QTomoError(Exception):
    """Base class for all library errors."""


class InvalidParameter(QTomoError, ValueError):
    pass


class TruncationOverflow(QTomoError):
    """Creation operator would push amplitude past the Fock cutoff."""


class TruncationError(QTomoError):
    """No cutoff up to the hard cap meets the requested tail tolerance."""


class DivergentAmplitude(QTomoError, ValueError):
    pass


class DegenerateState(QTomoError, ValueError):
    pass


class OrderTooHigh(QTomoError, ValueError):
    pass


class IncompleteTable(QTomoError, KeyError):
    pass


class EigenFailure(QTomoError):
    pass


class InsufficientRule(QTomoError, ValueError):
    pass


class DegenerateAngles(QTomoError, ValueError):
    pass


class IllConditioned(QTomoError):
    pass


class IncompatibleGrid(QTomoError, ValueError):
    pass
