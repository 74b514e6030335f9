"""Exception hierarchy shared by the library and the CLI."""


class BoolPropError(Exception):
    """Base class for all library errors."""


class ArityError(BoolPropError, ValueError):
    """Functions or states of different arity were combined, or n is out of range."""


class FormatError(BoolPropError, ValueError):
    """Malformed truth-table text or generator spec."""


class PromiseError(BoolPropError, ValueError):
    """An instance violates the promise a tester relies on."""


class RepresentabilityError(PromiseError):
    """A requested distance/bias cannot be realised exactly at the given arity.

    ``nearest`` holds the closest representable values (below, above).
    """

    def __init__(self, message, nearest=()):
        super().__init__(message)
        self.nearest = tuple(nearest)
