"""Run logging and classification history."""

import json
import logging
import os
from datetime import datetime, timedelta
from pathlib import Path
from typing import Any, Dict, List, Optional

from .classifier import Verdict

HISTORY_FILE = "run_history.json"
HISTORY_LIMIT = 1000


class RunLogger:
    """Writes a dated log file and keeps a JSON history of runs."""

    def __init__(self, log_dir: Optional[str] = None, log_level: str = "INFO"):
        if log_dir:
            self.log_dir = Path(log_dir)
        else:
            self.log_dir = Path.home() / ".config" / "isoformal" / "logs"

        self.log_dir.mkdir(parents=True, exist_ok=True)

        self.logger = logging.getLogger("isoformal")
        self.logger.setLevel(getattr(logging, log_level.upper()))

        self.file_formatter = logging.Formatter(
            "%(asctime)s - %(name)s - %(levelname)s - %(funcName)s:%(lineno)d - %(message)s"
        )
        log_file = self.log_dir / f"isoformal-{datetime.now().strftime('%Y%m%d')}.log"
        self.file_handler = logging.FileHandler(log_file)
        self.file_handler.setLevel(logging.DEBUG)
        self.file_handler.setFormatter(self.file_formatter)
        self.logger.addHandler(self.file_handler)

        self.run_history: List[Dict[str, Any]] = []
        self.current_run_id = self._generate_run_id()
        self._load_history()

        self.logger.info(f"Run started: {self.current_run_id}")

    def _generate_run_id(self) -> str:
        return f"run-{datetime.now().strftime('%Y%m%d-%H%M%S')}-{os.getpid()}"

    def _load_history(self) -> None:
        history_file = self.log_dir / HISTORY_FILE
        if history_file.exists():
            try:
                with open(history_file, "r") as f:
                    self.run_history = json.load(f)
            except Exception as e:
                self.logger.warning(f"Failed to load run history: {e}")
                self.run_history = []

    def _save_history(self) -> None:
        history_file = self.log_dir / HISTORY_FILE
        try:
            if len(self.run_history) > HISTORY_LIMIT:
                self.run_history = self.run_history[-HISTORY_LIMIT:]
            with open(history_file, "w") as f:
                json.dump(self.run_history, f, indent=2, default=str)
        except Exception as e:
            self.logger.error(f"Failed to save run history: {e}")

    def _record(self, event_type: str, **fields: Any) -> None:
        self.run_history.append(
            {
                "run_id": self.current_run_id,
                "timestamp": datetime.now().isoformat(),
                "event_type": event_type,
                **fields,
            }
        )

    def log_classification(
        self, group: str, subgroup: str, verdict: Verdict, elapsed: Optional[float] = None
    ) -> None:
        """Log one classify() outcome."""
        if verdict.unsupported:
            self.logger.warning(f"Unsupported: {group} / {subgroup}: {verdict.reason}")
        else:
            self.logger.info(
                f"Classified {group} / {subgroup}: formal={verdict.formal} "
                f"({verdict.branch.value}, d={verdict.d})"
            )
        for step in verdict.trace:
            self.logger.debug(f"[{step.step}] {step.detail}")

        self._record(
            "classification",
            group=group,
            subgroup=subgroup,
            formal=verdict.formal,
            branch=verdict.branch.value,
            d=verdict.d,
            n_order=verdict.n_order,
            wv_order=verdict.wv_order,
            execution_time=elapsed if elapsed is not None else verdict.elapsed,
        )
        self._save_history()

    def log_corpus_row(
        self,
        source: str,
        group: str,
        subgroup: str,
        passed: bool,
        diffs: Optional[List[str]] = None,
        elapsed: Optional[float] = None,
    ) -> None:
        if passed:
            self.logger.info(f"Corpus row passed: {source}")
        else:
            self.logger.error(f"Corpus row failed: {source}: {'; '.join(diffs or [])}")

        self._record(
            "corpus_row",
            source=source,
            group=group,
            subgroup=subgroup,
            success=passed,
            diffs=diffs or [],
            execution_time=elapsed,
        )

    def log_corpus_summary(self, paths: List[str], total: int, failed: int) -> None:
        self.logger.info(f"Corpus {', '.join(paths)}: {total} rows, {failed} failed")
        self._record(
            "corpus_summary", paths=paths, total=total, failed=failed, success=failed == 0
        )
        self._save_history()

    def log_cap_exceeded(self, what: str, cap: int, group: Optional[str] = None) -> None:
        self.logger.warning(f"Cap exceeded for {what} (cap {cap})")
        self._record("cap_exceeded", what=what, cap=cap, group=group)
        self._save_history()

    def log_cross_validation(
        self,
        group: str,
        subgroup: str,
        d: int,
        d_s: int,
        n_order: int,
        coinvariant_d: int,
        success: bool,
    ) -> None:
        message = (
            f"Cross-validation {group} / {subgroup}: d={d}, d_S={d_s}, |N|={n_order}, "
            f"coinvariant d={coinvariant_d}"
        )
        if success:
            self.logger.info(message)
        else:
            self.logger.error(message + " (disagreement)")
        self._record(
            "cross_validation",
            group=group,
            subgroup=subgroup,
            d=d,
            d_s=d_s,
            n_order=n_order,
            coinvariant_d=coinvariant_d,
            success=success,
        )
        self._save_history()

    def get_run_history(
        self,
        run_id: Optional[str] = None,
        event_type: Optional[str] = None,
        group: Optional[str] = None,
        limit: Optional[int] = None,
    ) -> List[Dict[str, Any]]:
        """Get run history with optional filtering."""
        history = self.run_history
        if run_id:
            history = [h for h in history if h.get("run_id") == run_id]
        if event_type:
            history = [h for h in history if h.get("event_type") == event_type]
        if group:
            history = [h for h in history if h.get("group") == group]
        if limit:
            history = history[-limit:]
        return history

    def get_run_statistics(self, run_id: Optional[str] = None) -> Dict[str, Any]:
        """Counts by event type, verdict and outcome for one run or all runs."""
        history = self.get_run_history(run_id=run_id)

        stats: Dict[str, Any] = {
            "total_events": len(history),
            "event_types": {},
            "groups": set(),
            "formal": 0,
            "not_formal": 0,
            "unsupported": 0,
            "passed": 0,
            "failed": 0,
            "run_duration": None,
        }
        if not history:
            stats["groups"] = []
            return stats

        first_event = min(h["timestamp"] for h in history)
        last_event = max(h["timestamp"] for h in history)
        try:
            first_time = datetime.fromisoformat(first_event)
            last_time = datetime.fromisoformat(last_event)
            stats["run_duration"] = (last_time - first_time).total_seconds()
        except ValueError:
            pass

        for event in history:
            event_type = event.get("event_type", "unknown")
            stats["event_types"][event_type] = stats["event_types"].get(event_type, 0) + 1
            if event.get("group"):
                stats["groups"].add(event["group"])

            if event_type == "classification":
                if event.get("branch") == "unsupported":
                    stats["unsupported"] += 1
                elif event.get("formal"):
                    stats["formal"] += 1
                else:
                    stats["not_formal"] += 1

            if event.get("success") is True:
                stats["passed"] += 1
            elif event.get("success") is False:
                stats["failed"] += 1

        stats["groups"] = sorted(stats["groups"])
        return stats

    def export_history(self, filename: str, run_id: Optional[str] = None) -> Path:
        """Export history to a JSON file, relative paths landing in log_dir."""
        history = self.get_run_history(run_id=run_id)
        export_path = Path(filename)
        if not export_path.is_absolute():
            export_path = self.log_dir / export_path
        with open(export_path, "w") as f:
            json.dump(history, f, indent=2, default=str)
        self.logger.info(f"Exported {len(history)} history entries to {export_path}")
        return export_path

    def clear_history(self, older_than_days: Optional[int] = None) -> int:
        """Clear history, optionally keeping entries newer than the cutoff."""
        if older_than_days is None:
            count = len(self.run_history)
            self.run_history = []
        else:
            cutoff = datetime.now().replace(hour=0, minute=0, second=0, microsecond=0)
            cutoff_iso = (cutoff - timedelta(days=older_than_days)).isoformat()
            original_count = len(self.run_history)
            self.run_history = [
                h for h in self.run_history if h.get("timestamp", "") >= cutoff_iso
            ]
            count = original_count - len(self.run_history)

        self._save_history()
        self.logger.info(f"Cleared {count} history entries")
        return count

    def close(self) -> None:
        self.logger.info(f"Run ended: {self.current_run_id}")
        self._save_history()
        for handler in self.logger.handlers[:]:
            handler.close()
            self.logger.removeHandler(handler)
