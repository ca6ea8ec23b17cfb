from __future__ import annotations

import contextlib
import contextvars
import logging
import time
from typing import Dict, Iterator, Optional

import wrapt

from terranalog.core.enum import Stage

_logger = logging.getLogger(__name__)


class StageTimer:
    """
    Wall-clock seconds spent in each funnel stage.

    A timer only records while it is active; stage functions called outside
    :meth:`activate` run untimed.
    """

    _active = contextvars.ContextVar("stage_timer", default=None)

    def __init__(self) -> None:
        self.timings: Dict[str, float] = {}

    @classmethod
    def current(cls) -> Optional[StageTimer]:
        return cls._active.get()

    @contextlib.contextmanager
    def activate(self) -> Iterator[StageTimer]:
        token = StageTimer._active.set(self)
        try:
            yield self
        finally:
            StageTimer._active.reset(token)

    def record(self, stage: Stage, seconds: float) -> None:
        key = Stage(stage).value
        self.timings[key] = self.timings.get(key, 0.0) + seconds

    def total(self) -> float:
        return sum(self.timings.values())

    def to_dict(self) -> Dict[str, float]:
        return {
            stage.value: self.timings[stage.value]
            for stage in Stage
            if stage.value in self.timings
        }


def timed_stage(stage: Stage):
    """Decorate a stage entry point so the active :class:`StageTimer` records it."""

    @wrapt.decorator
    def wrapper(wrapped=None, _=None, args=None, kwargs=None):
        timer = StageTimer.current()
        if timer is None:
            return wrapped(*args, **kwargs)
        start = time.perf_counter()
        try:
            return wrapped(*args, **kwargs)
        finally:
            elapsed = time.perf_counter() - start
            timer.record(stage, elapsed)
            _logger.debug("Stage %s took %.3f s", stage.value, elapsed)

    return wrapper
