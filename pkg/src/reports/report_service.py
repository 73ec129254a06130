import json
import math
import logging
from typing import Any, Dict, List, Optional, TextIO

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

OUTPUT_FORMATS = ('json', 'csv')
CSV_FLOAT_FORMAT = '%.12g'


def to_plain(value: Any) -> Any:
    """Convert numpy values, tuples and non-finite floats into JSON-ready Python."""
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_plain(value.tolist())
    if isinstance(value, np.generic):
        return to_plain(value.item())
    if isinstance(value, complex):
        return {'re': to_plain(value.real), 'im': to_plain(value.imag)}
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


class ReportService:
    def __init__(self, version: str, config_echo: Optional[Dict[str, Any]] = None,
                 output_format: str = 'json', stream: Optional[TextIO] = None):
        if output_format not in OUTPUT_FORMATS:
            raise ValueError(f"output format must be one of {OUTPUT_FORMATS}, got {output_format!r}")
        self.version = version
        self.config_echo = config_echo or {}
        self.output_format = output_format
        self.stream = stream

    def document(self, subcommand: str, payload: Dict[str, Any]) -> Dict[str, Any]:
        """The canonical report: subcommand, version, config echo and result."""
        return {
            'subcommand': subcommand,
            'version': self.version,
            'config': to_plain(self.config_echo),
            'result': to_plain(payload),
        }

    def render(self, subcommand: str, payload: Dict[str, Any], rows: Optional[List[Dict[str, Any]]] = None) -> str:
        """
        JSON mode: one document with sorted keys.
        CSV mode: one line per row, or the flattened result when there are no rows.
        """
        if self.output_format == 'json':
            return json.dumps(self.document(subcommand, payload), sort_keys=True, indent=2) + '\n'

        if rows:
            frame = pd.DataFrame([to_plain(row) for row in rows])
        else:
            frame = pd.json_normalize(to_plain(payload))
            frame = frame[sorted(frame.columns)]
        return frame.to_csv(index=False, float_format=CSV_FLOAT_FORMAT)

    def emit(self, subcommand: str, payload: Dict[str, Any], rows: Optional[List[Dict[str, Any]]] = None) -> str:
        text = self.render(subcommand, payload, rows)
        logger.debug(f"Emitting {self.output_format} report for {subcommand} ({len(rows or [])} rows)")
        if self.stream is not None:
            self.stream.write(text)
            self.stream.flush()
        return text

    def emit_error(self, subcommand: Optional[str], error: BaseException) -> str:
        """Error document; always JSON so callers can parse failures uniformly."""
        document = {
            'subcommand': subcommand,
            'version': self.version,
            'error': {'type': type(error).__name__, 'message': str(error)},
        }
        text = json.dumps(document, sort_keys=True, indent=2) + '\n'
        if self.stream is not None:
            self.stream.write(text)
            self.stream.flush()
        return text
