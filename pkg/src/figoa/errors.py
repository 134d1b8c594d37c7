"""Exception hierarchy shared by every figoa module."""


class FigoaError(Exception):
    """Base class for all figoa errors."""


class MisalignedInput(FigoaError, ValueError):
    pass


class LengthMismatch(FigoaError, ValueError):
    pass


class BadStateEncoding(FigoaError, ValueError):
    pass


class UnsupportedScheme(FigoaError, ValueError):
    pass


class MtuTooSmall(FigoaError, ValueError):
    pass


class Incomplete(FigoaError):
    pass


class NoRoute(FigoaError):
    pass


class InvalidTopology(FigoaError, ValueError):
    pass


class WireError(FigoaError, ValueError):
    """Decoding failure. ``field`` names the offending TLV or packet field."""

    def __init__(self, field: str, message: str = ""):
        self.field = field
        super().__init__(f"{field}: {message}" if message else field)


class Truncated(WireError):
    pass


class UnknownType(WireError):
    pass


class InvariantViolation(WireError):
    pass
