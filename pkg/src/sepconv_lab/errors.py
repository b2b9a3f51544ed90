"""Exception types shared across the package."""


class SepconvError(Exception):
    """Base class for every error raised by this package."""


class InvalidDimensionError(SepconvError):
    """Image or plane dimensions too small for the requested kernel."""


class InvalidArgumentError(SepconvError):
    """Mismatched shapes, aliased buffers, or out-of-range indices."""


class UnsupportedWidthError(SepconvError):
    """Kernel width not handled by a specialised code path."""


class UnsupportedCombinationError(SepconvError):
    """Execution plan options that cannot be combined."""


class PpmParseError(SepconvError):
    """Malformed PPM input; carries the byte offset of the failure."""

    def __init__(self, message: str, byte_offset: int):
        super().__init__(f"{message} (byte offset {byte_offset})")
        self.byte_offset = byte_offset


class ConfigError(SepconvError):
    """Invalid benchmark or CLI configuration."""


class ExecutionError(SepconvError):
    """One or more workers failed inside a parallel launch."""

    def __init__(self, failures):
        self.failures = list(failures)
        detail = "; ".join(f"worker {w}: {exc!r}" for w, exc in self.failures)
        super().__init__(f"{len(self.failures)} worker(s) failed: {detail}")
