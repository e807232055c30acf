"""Append-only JSON-lines measurement store.

One measurement per line, UTF-8, newline terminated. Appends are
serialized and flushed per line, so a crash loses at most the final
partial line; loading skips (and counts) anything malformed.
"""

from __future__ import annotations

import json
import logging
import os
import threading
from typing import Optional

from .measurements import Measurement, MeasurementRejected, measurement_to_wire, validate_measurement

logger = logging.getLogger(__name__)


class IoFailure(Exception):
    pass


def load_store(path: str) -> list[Measurement]:
    """Read every fully written, valid measurement line. An absent file is
    an empty store; malformed lines are logged and skipped, never fatal."""
    if not os.path.exists(path):
        return []
    measurements: list[Measurement] = []
    skipped = 0
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    raw = json.loads(line)
                    # stored records were validated on ingest; re-validation
                    # guards against file corruption (skew check excluded,
                    # old stores must remain loadable)
                    measurements.append(validate_measurement(raw, now_s=float("inf")))
                except (json.JSONDecodeError, MeasurementRejected) as exc:
                    skipped += 1
                    logger.warning("skipping malformed line %d of %s: %s", lineno, path, exc)
    except OSError as exc:
        raise IoFailure(f"cannot read measurement store {path}: {exc}") from exc
    if skipped:
        logger.warning("store %s: %d malformed line(s) skipped", path, skipped)
    return measurements


class MeasurementStore:
    """Append handle for the JSON-lines file; one line per admitted
    measurement, never rewritten."""

    def __init__(self, path: str):
        self.path = path
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        self._lock = threading.Lock()
        self._fh: Optional[object] = None

    def append(self, m: Measurement) -> None:
        line = json.dumps(measurement_to_wire(m), separators=(",", ":"))
        with self._lock:
            if self._fh is None:
                self._fh = open(self.path, "a", encoding="utf-8")
            self._fh.write(line + "\n")
            self._fh.flush()

    def load(self) -> list[Measurement]:
        with self._lock:
            if self._fh is not None:
                self._fh.flush()
        return load_store(self.path)

    def close(self) -> None:
        with self._lock:
            if self._fh is not None:
                self._fh.close()
                self._fh = None
