from __future__ import annotations

from terranalog.core.enum.stage import Stage
from terranalog.exception.terranalog_error import TerranalogError


class StageInputError(TerranalogError):
    """Exception raised when a stage operation receives unusable input."""


class EmptyStageError(TerranalogError):
    """
    Exception raised when a funnel stage produces no candidates.

    Parameters
    ----------
    stage : Stage
        The stage whose output was empty.
    detail : str, optional
        Extra context appended to the message.
    """

    def __init__(self, stage: Stage, detail: str = ""):
        self.stage = stage
        message = f"Stage {stage.value} produced no candidates."
        if detail:
            message = f"{message} {detail}"
        super().__init__(message)
