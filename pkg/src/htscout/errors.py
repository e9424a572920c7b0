"""Exception types shared across the toolkit."""


class HtscoutError(Exception):
    """Base class for all toolkit errors."""


class BenchParseError(HtscoutError):
    """Malformed .bench input; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NetlistError(HtscoutError):
    """Structural violation in a netlist (cycles, drivers, arity)."""


class ConfigError(HtscoutError):
    """Invalid campaign configuration."""


class DelayModelError(HtscoutError):
    """Delay law cannot be evaluated (threshold voltage out of range)."""


class CalibrationError(HtscoutError):
    """Calibration data missing, degenerate, or mismatched."""


class SelectionError(HtscoutError):
    """Path selection or reference-path creation failed."""


class StageError(HtscoutError):
    """A pipeline stage failed; carries the stage name."""

    def __init__(self, stage: str, message: str):
        self.stage = stage
        super().__init__(f"[{stage}] {message}")
