"""Exception hierarchy.

Every error carries a short machine-readable ``code`` that the CLI prints
on failure.
"""


class RdhError(Exception):
    code = "rdh_error"


class ImageFormatError(RdhError, ValueError):
    code = "bad_image"


class ImageTooSmallError(RdhError, ValueError):
    code = "image_too_small"


class ConfigError(RdhError, ValueError):
    code = "bad_config"


class CapacityError(RdhError):
    code = "capacity_exceeded"


class HeaderOverflowError(RdhError):
    code = "header_overflow"


class HeaderError(RdhError, ValueError):
    code = "bad_header"


class ExtractionError(RdhError):
    code = "extraction_failed"
