"""Plot-ready tables: CSV with a schema comment line, or JSON records."""

import io
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

logger = logging.getLogger(__name__)

SCHEMA = "raman-comb schema v1"
FLOAT_FORMAT = "%.17g"


def _plain(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return None if math.isnan(value) else value
    return value


def render_csv(frame):
    buffer = io.StringIO()
    buffer.write(f"# {SCHEMA}\n")
    frame.to_csv(buffer, index=False, float_format=FLOAT_FORMAT, na_rep="", lineterminator="\n")
    return buffer.getvalue()


def render_json(frame, config=None):
    rows = [{key: _plain(value) for key, value in row.items()} for row in frame.to_dict(orient="records")]
    document = {"schema": SCHEMA, "config": config, "rows": rows}
    return json.dumps(document, indent=2, allow_nan=False) + "\n"


def render(frame, fmt="csv", config=None):
    if fmt == "csv":
        return render_csv(frame)
    if fmt == "json":
        return render_json(frame, config)
    raise ValueError(f"unknown output format {fmt!r}")


def write_table(frame, path=None, fmt="csv", config=None):
    """Write ``frame`` to ``path`` (stdout when None) and return the text."""
    text = render(frame, fmt, config)
    if path is None:
        sys.stdout.write(text)
    else:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
        logger.info("wrote %d rows to %s", len(frame), path)
    return text
