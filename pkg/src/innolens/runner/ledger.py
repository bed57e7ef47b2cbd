"""Persistent run state: one JSON file, atomic rewrites, monotone cell statuses."""

from __future__ import annotations

import json
import os
import threading
from pathlib import Path

STATUSES = ("planned", "submitted", "downloaded", "cleaned", "scored")
_RANK = {name: i for i, name in enumerate(STATUSES)}


class StatusRegression(Exception):
    """Raised on an attempt to move a cell backwards."""


class RunLedger:
    def __init__(self, path: str | Path, data: dict | None = None):
        self.path = Path(path)
        self._data = data or {"cells": {}}
        self._lock = threading.Lock()

    @classmethod
    def load(cls, path: str | Path) -> "RunLedger":
        path = Path(path)
        if path.exists():
            return cls(path, json.loads(path.read_text(encoding="utf-8")))
        return cls(path)

    def _persist_locked(self) -> None:
        tmp = self.path.with_suffix(".tmp")
        tmp.write_text(json.dumps(self._data, indent=2, sort_keys=True) + "\n",
                       encoding="utf-8")
        os.replace(tmp, self.path)

    def ensure_cell(self, cell_id: str) -> dict:
        with self._lock:
            cell = self._data["cells"].setdefault(
                cell_id, {"status": "planned", "error": None, "jobs": {}}
            )
            self._persist_locked()
            return dict(cell)

    def get(self, cell_id: str) -> dict:
        with self._lock:
            return dict(self._data["cells"][cell_id])

    def cells(self) -> dict[str, dict]:
        with self._lock:
            return {k: dict(v) for k, v in self._data["cells"].items()}

    def status(self, cell_id: str) -> str:
        return self.get(cell_id)["status"]

    def set_status(self, cell_id: str, status: str) -> None:
        if status not in _RANK:
            raise ValueError(f"unknown status {status!r}")
        with self._lock:
            cell = self._data["cells"][cell_id]
            if _RANK[status] < _RANK[cell["status"]]:
                raise StatusRegression(
                    f"{cell_id}: {cell['status']} -> {status} would regress"
                )
            cell["status"] = status
            self._persist_locked()

    def record_job(self, cell_id: str, run_index: int, job_id: str,
                   handle: str | None) -> None:
        with self._lock:
            cell = self._data["cells"][cell_id]
            cell["jobs"][str(run_index)] = {"job_id": job_id, "handle": handle}
            self._persist_locked()

    def job_handle(self, cell_id: str, run_index: int) -> str | None:
        with self._lock:
            job = self._data["cells"][cell_id]["jobs"].get(str(run_index))
            return job["handle"] if job else None

    def set_error(self, cell_id: str, message: str | None) -> None:
        with self._lock:
            self._data["cells"][cell_id]["error"] = message
            self._persist_locked()

    def record_field(self, cell_id: str, key: str, value) -> None:
        with self._lock:
            self._data["cells"][cell_id][key] = value
            self._persist_locked()

    def all_scored(self) -> bool:
        cells = self.cells()
        return bool(cells) and all(c["status"] == "scored" for c in cells.values())
