"""Interval scheduler for the periodic retrain task.

A single daemon thread runs the task every interval; a tick that overruns
the interval delays the next one (ticks never overlap). Task errors are
logged and the schedule keeps going.
"""

from __future__ import annotations

import logging
import threading
from typing import Callable

logger = logging.getLogger(__name__)


class IntervalScheduler:
    def __init__(self, interval_s: float, task: Callable[[], None], name: str = "recluster"):
        self.interval_s = interval_s
        self.task = task
        self.name = name
        self._stop = threading.Event()
        self._thread: threading.Thread | None = None

    def start(self) -> None:
        if self._thread is not None:
            return
        self._stop.clear()
        self._thread = threading.Thread(target=self._run, name=f"{self.name}-scheduler", daemon=True)
        self._thread.start()

    def _run(self) -> None:
        while not self._stop.wait(self.interval_s):
            try:
                self.task()
            except Exception:
                logger.exception("scheduled task %s failed", self.name)

    def stop(self, timeout: float = 5.0) -> None:
        self._stop.set()
        if self._thread is not None:
            self._thread.join(timeout=timeout)
            self._thread = None
