"""Exception hierarchy shared across the toolkit."""


class TrajaugError(Exception):
    """Base class for all toolkit errors."""


class DegenerateInputError(TrajaugError):
    """Input too small or empty to operate on (e.g. fewer than 2 points)."""


class InvalidTimeError(TrajaugError):
    """Timestamps are duplicated, decreasing, or not on the uniform grid."""


class DegeneratePolylineError(TrajaugError):
    """Polyline has zero total arc length."""

    reason = "degenerate_polyline"


class DegenerateChordError(TrajaugError):
    """Endpoint chord too short to define a stable similarity transform."""

    reason = "degenerate_chord"


class ShapeMismatchError(TrajaugError):
    """Array shapes inconsistent with the declared model dimensions."""


class TrainingDivergedError(TrajaugError):
    """Loss became non-finite during training."""

    def __init__(self, epoch: int, message: str | None = None):
        self.epoch = epoch
        super().__init__(message or f"training diverged at epoch {epoch}")


class ConfigError(TrajaugError):
    """Invalid run configuration (unknown key, bad value, unresolvable path)."""


class IngestionError(TrajaugError):
    """Dataset file violates the schema; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class StageError(TrajaugError):
    """A pipeline stage failed; carries the stage name and the cause."""

    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage '{stage}' failed: {cause}")
