"""Exception types shared across the package."""


class FormatError(Exception):
    """A binary stream or snapshot failed validation.

    Carries the byte offset of the offending field when known.
    """

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class ConfigError(Exception):
    """An experiment configuration is inconsistent or unsupported."""
