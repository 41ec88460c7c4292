#!/usr/bin/env python3
"""
Result Storage
Saves command results and text artifacts (CSV, DIMACS) to timestamped files
in the results directory, and lists, loads and deletes them again.
"""

import json
import logging
import os
import re
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional

from .config import get_settings
from .errors import ParameterError

logger = logging.getLogger(__name__)


def _safe_slug(text: str) -> str:
    slug = re.sub(r"[^a-z0-9.]+", "_", text.lower()).strip("_")
    return slug or "run"


def _summarize(result: Any) -> Dict[str, Any]:
    if not isinstance(result, dict):
        return {"type": type(result).__name__}
    summary: Dict[str, Any] = {"keys": sorted(result)}
    for key in ("passed", "status", "exact", "value", "violation_count"):
        if key in result:
            summary[key] = result[key]
    if isinstance(result.get("best"), dict):
        summary["best"] = result["best"].get("value")
    return summary


class ResultStorage:
    """Handles saving and loading hypchroma results"""

    def __init__(self, results_dir: Optional[str] = None):
        self.results_dir = Path(results_dir or get_settings().results_dir)
        self.results_dir.mkdir(parents=True, exist_ok=True)

    def _filename(self, command: str, slug: str, suffix: str) -> str:
        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        stem = f"{_safe_slug(command)}_{_safe_slug(slug)}_{timestamp}"
        filename = f"{stem}{suffix}"
        counter = 1
        while (self.results_dir / filename).exists():
            filename = f"{stem}_{counter}{suffix}"
            counter += 1
        return filename

    def _resolve(self, filename: str) -> Path:
        path = (self.results_dir / filename).resolve()
        if path.parent != self.results_dir.resolve():
            raise ParameterError(f"refusing path outside {self.results_dir}: {filename}")
        return path

    def save_result(self, command: str, params: Dict[str, Any], result: Any, slug: str = "") -> str:
        """
        Save one command result to a JSON file

        Args:
            command: CLI command that produced the result
            params: Parameters the command ran with
            result: JSON-compatible payload
            slug: Short tag for the filename, e.g. "d1.5"

        Returns:
            str: Filename of the saved result
        """
        filename = self._filename(command, slug or command, ".json")
        envelope = {
            "timestamp": datetime.now().isoformat(),
            "command": command,
            "params": params,
            "result": result,
            "summary": _summarize(result),
        }
        with open(self.results_dir / filename, "w", encoding="utf-8") as f:
            json.dump(envelope, f, indent=2, ensure_ascii=False)
        logger.info("saved result %s", filename)
        return filename

    def save_text(self, command: str, text: str, slug: str = "", suffix: str = ".txt") -> str:
        """Save a text artifact (CSV, DIMACS CNF, edge list) next to the JSON results."""
        filename = self._filename(command, slug or command, suffix)
        with open(self.results_dir / filename, "w", encoding="utf-8") as f:
            f.write(text)
        logger.info("saved artifact %s", filename)
        return filename

    def get_all_results(self) -> List[Dict[str, Any]]:
        """All saved JSON results, newest first."""
        results = []
        for path in self.results_dir.glob("*.json"):
            try:
                with open(path, "r", encoding="utf-8") as f:
                    data = json.load(f)
            except (OSError, json.JSONDecodeError) as e:
                logger.warning("skipping unreadable result %s: %s", path.name, e)
                continue
            stat = path.stat()
            data["filename"] = path.name
            data["file_size"] = stat.st_size
            data["modified"] = datetime.fromtimestamp(stat.st_mtime).isoformat()
            results.append(data)
        results.sort(key=lambda r: (r["modified"], r["filename"]), reverse=True)
        return results

    def get_result_by_filename(self, filename: str) -> Optional[Dict[str, Any]]:
        path = self._resolve(filename)
        if not path.exists():
            return None
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)

    def delete_result(self, filename: str) -> bool:
        path = self._resolve(filename)
        if not path.exists():
            logger.warning("result not found: %s", filename)
            return False
        os.remove(path)
        logger.info("deleted result %s", filename)
        return True
