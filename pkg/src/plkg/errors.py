"""Error types shared across the package; the CLI maps them to exit codes."""


class ConfigError(ValueError):
    """Invalid configuration value or combination."""


class TraceFormatError(ValueError):
    """Malformed trace file; carries the offending line number when known."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class PipelineError(RuntimeError):
    """Failure inside a pipeline stage; carries the stage name."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage '{stage}': {cause}")
        self.stage = stage
        self.cause = cause
