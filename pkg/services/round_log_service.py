from typing import Dict, Any, List, Optional, TextIO
import csv
import io
import json
import logging
import os
import sys
import time

from models.experiment_config import LogFormat
from models.metrics_report import METRIC_FIELDS, EvalScope, FederationResult

logger = logging.getLogger(__name__)

ROUND_LOG_COLUMNS = ("round", *METRIC_FIELDS, "bytes_down", "bytes_up", "scope", "n_samples")


def _format_cell(value: Any) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


class RoundLogService:
    """
    Service for turning a run's reports and traffic into the round log and
    a run summary
    """

    def __init__(self, log_format: LogFormat = LogFormat.STDOUT, path: Optional[str] = None,
                 stream: Optional[TextIO] = None):
        """
        Initialize the round log service
        """
        self.log_format = LogFormat(log_format)
        self.path = path
        self.stream = stream
        self.session_start_time = time.time()
        if self.log_format != LogFormat.STDOUT and not path:
            raise ValueError(f"A path is required for the {self.log_format.value} round log")

    def rows(self, result: FederationResult) -> List[Dict[str, Any]]:
        """
        One row per report, ordered by round.

        Traffic columns hold the bytes exchanged since the previous logged
        round, so rounds skipped by the evaluation schedule are still counted.
        Reports of the same round (both scopes) repeat that round's window;
        summing one row per distinct round gives the run's total traffic.
        """
        rows = []
        previous: Optional[int] = None
        window_end: Optional[int] = None
        traffic = None
        for report in sorted(result.reports, key=lambda r: (r.round, r.scope != EvalScope.SERVER_GLOBAL)):
            if report.round != window_end:
                previous, window_end = window_end, report.round
                traffic = result.traffic.between(previous, report.round)
            row = report.to_dict()
            row["bytes_down"] = traffic.bytes_down
            row["bytes_up"] = traffic.bytes_up
            rows.append({column: row[column] for column in ROUND_LOG_COLUMNS})
        return rows

    def render(self, result: FederationResult) -> str:
        rows = self.rows(result)
        if self.log_format == LogFormat.JSON:
            return json.dumps(rows, indent=2) + "\n"
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(ROUND_LOG_COLUMNS)
        for row in rows:
            writer.writerow([_format_cell(row[column]) for column in ROUND_LOG_COLUMNS])
        return buffer.getvalue()

    def write(self, result: FederationResult) -> str:
        """
        Emit the round log to its destination and return the text written
        """
        text = self.render(result)
        if self.log_format == LogFormat.STDOUT:
            (self.stream or sys.stdout).write(text)
            return text

        directory = os.path.dirname(self.path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(self.path, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        logger.info(f"Round log written to {self.path}")
        return text

    @staticmethod
    def load_rows(path: str) -> List[Dict[str, str]]:
        """
        Read a round log back (values as written: strings for csv)
        """
        with open(path, encoding="utf-8") as f:
            if path.endswith(".json"):
                return json.load(f)
            return list(csv.DictReader(f))

    def get_summary(self, result: FederationResult) -> Dict[str, Any]:
        """
        Get a summary of the run
        """
        final = result.final_report(EvalScope.SERVER_GLOBAL) or result.final_report(EvalScope.CLIENT_MEAN)
        totals = result.traffic.totals
        return {
            'rounds_evaluated': len(result.evaluated_rounds()),
            'final_round': final.round if final else None,
            'final_accuracy': final.accuracy if final else None,
            'final_f1_macro': final.f1_macro if final else None,
            'bytes_down': totals.bytes_down,
            'bytes_up': totals.bytes_up,
            'total_bytes': result.traffic.total_bytes(),
            'wall_time': time.time() - self.session_start_time,
        }

    def print_summary(self, result: FederationResult):
        """
        Log a summary of the run (stderr; stdout may carry the round log)
        """
        summary = self.get_summary(result)
        logger.info("=== Run Summary ===")
        if summary['final_accuracy'] is not None:
            logger.info(f"Final accuracy (round {summary['final_round']}): {summary['final_accuracy']:.4f}")
            logger.info(f"Final macro F1: {summary['final_f1_macro']:.4f}")
        else:
            logger.info("No evaluation reports (no test data)")
        logger.info(f"Traffic: {summary['bytes_down']} bytes down, {summary['bytes_up']} bytes up")
        logger.info(f"Wall time: {summary['wall_time']:.2f}s")
