"""
Error hierarchy shared by every stage of the registration toolkit.

Each class carries the process exit code the management commands use, so
the command layer maps failures to codes without a lookup table of its own.
"""


class RstError(Exception):
    exit_code = 1


class InvalidConfigError(RstError):
    exit_code = 2


class ImageReadError(RstError):
    exit_code = 3


class PnmDecodeError(RstError):
    exit_code = 4


class MalformedHeaderError(PnmDecodeError):
    pass


class UnsupportedFormatError(PnmDecodeError):
    pass


class ZeroDimensionError(PnmDecodeError):
    pass


class TruncatedDataError(PnmDecodeError):
    pass


class NoSignalError(RstError):
    exit_code = 6


class BlankImageError(NoSignalError):
    """The ink mask is empty: the input carries no signature content."""
    exit_code = 5


class DegenerateRangeError(NoSignalError):
    """max == min, so min-max normalization has no range to map."""


class DegenerateSizeError(RstError):
    exit_code = 7


class ContentOverflowError(RstError):
    exit_code = 8


class ImageWriteError(RstError):
    exit_code = 9


class DimensionMismatchError(RstError):
    exit_code = 1


# Exit status of `batch` when at least one item failed
PARTIAL_FAILURE_EXIT_CODE = 10

EXIT_CODE_HELP = (
    "exit codes: 0 ok; 1 internal error; 2 invalid arguments; "
    "3 unreadable input; 4 PNM decode error; 5 blank image (no ink); "
    "6 no correlation signal; 7 degenerate size; 8 content overflow; "
    "9 write failure; 10 batch finished with failed items"
)
