"""Exception types raised across the library."""


class DomainError(ValueError):
    """Input lies outside an operation's documented domain."""


class UnsupportedParameterError(ValueError):
    """Parameter combination is documented as out of scope."""


class UnsupportedInputError(ValueError):
    """Input shape or support the implementation cannot handle."""


class SupportOverflowError(ValueError):
    """A frequency grid is too small for the convolution support it must hold."""


class InvalidProfileError(ValueError):
    """Bump profile violates the plateau/support constraints."""


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""
