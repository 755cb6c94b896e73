"""Writes scenario reports and keeps an index of archived runs."""

import json
import logging
import os
from datetime import datetime
from typing import Any, Dict, List, Optional

from starmod.infrastructure.config import REPORT_INDENT

log = logging.getLogger(__name__)

INDEX_FILE = "run_index.json"


def dump_json(data: Any) -> str:
    """Canonical JSON text: fixed indent and key order, so equal reports are byte-identical."""
    return json.dumps(data, indent=REPORT_INDENT, sort_keys=True, ensure_ascii=False) + "\n"


def write_text(path: str, text: str) -> None:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        f.write(text)
    log.info(f"Wrote report to {path}")


class ReportManager:
    """Handles archiving reports under the output directory and indexing runs."""

    def __init__(self, output_dir: str, run_name: str, timestamp: Optional[str] = None):
        """Initialize report manager.

        Args:
            output_dir: Base output directory
            run_name: Scenario name (or file stem) for this run
            timestamp: ISO timestamp for this run, defaults to now
        """
        self.output_dir = output_dir
        self.run_name = run_name
        self.timestamp = timestamp or datetime.now().isoformat(timespec="seconds")

        self.run_dir = os.path.join(
            output_dir,
            f"run_{run_name}_{datetime.fromisoformat(self.timestamp).strftime('%Y%m%d_%H%M%S')}"
        )
        os.makedirs(self.run_dir, exist_ok=True)

    def save_json_report(self, report: Dict) -> str:
        """Save the JSON report in the run directory."""
        output_path = os.path.join(self.run_dir, "report.json")
        write_text(output_path, dump_json(report))
        return output_path

    def save_text_report(self, text: str) -> str:
        """Save the rendered text report in the run directory."""
        output_path = os.path.join(self.run_dir, "report.txt")
        write_text(output_path, text)
        return output_path

    def update_run_index(self, report: Dict, scenario_path: str) -> None:
        """Append metadata about this run to the run index."""
        index_path = os.path.join(self.output_dir, INDEX_FILE)
        index = self._load_index()
        index.append({
            "timestamp": self.timestamp,
            "run_dir": os.path.basename(self.run_dir),
            "scenario_path": scenario_path,
            "scenario": report.get("scenario"),
            "summary": report.get("summary", {}),
        })
        with open(index_path, 'w', encoding='utf-8') as f:
            json.dump(index, f, indent=REPORT_INDENT, ensure_ascii=False)
        log.info(f"Updated run index: {index_path}")

    def _load_index(self) -> List[Dict]:
        index_path = os.path.join(self.output_dir, INDEX_FILE)
        if os.path.exists(index_path):
            try:
                with open(index_path, 'r', encoding='utf-8') as f:
                    return json.load(f)
            except Exception as e:
                log.warning(f"Failed to load run index: {e}")
        return []

    @staticmethod
    def load_latest_report(output_dir: str) -> Optional[Dict]:
        """Load the report of the most recent archived run, or None."""
        index_path = os.path.join(output_dir, INDEX_FILE)
        if not os.path.exists(index_path):
            return None
        try:
            with open(index_path, 'r', encoding='utf-8') as f:
                index = json.load(f)
            if not index:
                return None
            report_path = os.path.join(output_dir, index[-1]['run_dir'], 'report.json')
            if os.path.exists(report_path):
                with open(report_path, 'r', encoding='utf-8') as rf:
                    return json.load(rf)
        except Exception as e:
            log.warning(f"Failed to load latest report: {e}")
        return None
