"""Exception types raised across the package."""

from __future__ import annotations


class StridepackError(Exception):
    """Base class for every error raised by stridepack."""


class ValueRangeError(StridepackError, ValueError):
    def __init__(self, row: int, col: int, value: int, bits: int):
        self.row, self.col, self.value, self.bits = row, col, value, bits
        super().__init__(
            f"value {value} at row {row}, col {col} is outside the {bits}-bit signed range"
        )


class UnsupportedWidthError(StridepackError, ValueError):
    pass


class CorruptLayoutError(StridepackError, ValueError):
    pass


class ShapeError(StridepackError, ValueError):
    pass


class UnsupportedKernelError(StridepackError, ValueError):
    pass


class DomainError(StridepackError, ValueError):
    pass


class PackedFormatError(StridepackError):
    """Base for problems decoding a packed-matrix file."""


class BadMagicError(PackedFormatError):
    pass


class TruncatedPayloadError(PackedFormatError):
    pass


class VerificationError(StridepackError):
    """A kernel disagreed with the reference before being timed."""

    def __init__(self, kernel: str, rows: int, cols: int, detail: str = ""):
        self.kernel, self.rows, self.cols = kernel, rows, cols
        msg = f"kernel {kernel} produced wrong results at {rows}x{cols}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class ConfigError(StridepackError, ValueError):
    pass
