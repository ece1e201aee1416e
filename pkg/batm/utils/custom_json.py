"""JSON and JSON-lines helpers for batm artifacts.

Split manifests, epoch logs and topic descriptor files are written as JSON lines.
Their records routinely carry numpy scalars (metric values computed with numpy),
small numpy arrays, ``Path`` objects and pydantic models, none of which the
standard encoder accepts. :class:`EnhancedJSONEncoder` handles all of them.

Functions:
    dump_jsonl: Write an iterable of records as JSON lines.
    load_jsonl_records: Read JSON lines back as dictionaries.
"""

import json
from pathlib import Path
from typing import Any, Iterable

import numpy as np
from pydantic import BaseModel


class EnhancedJSONEncoder(json.JSONEncoder):
    """JSON encoder for the non-standard types found in batm records.

    Handles:
        - pathlib.Path objects (converted to strings)
        - numpy integer / floating / bool scalars (converted to Python scalars)
        - numpy arrays (converted to nested lists)
        - pydantic models (dumped in JSON mode)
    """

    def default(self, o):
        """Serialize objects that are not natively JSON serializable.

        Args:
            o: The object to serialize.

        Returns:
            A JSON-serializable representation of the object.

        Raises:
            TypeError: If the object type is not supported by this encoder.
        """
        if isinstance(o, Path):
            return str(o)
        if isinstance(o, np.bool_):
            return bool(o)
        if isinstance(o, np.integer):
            return int(o)
        if isinstance(o, np.floating):
            return float(o)
        if isinstance(o, np.ndarray):
            return o.tolist()
        if isinstance(o, BaseModel):
            return o.model_dump(mode="json", by_alias=True)
        return super().default(o)


def dumps(record: Any) -> str:
    """Encode a single record as compact JSON with stable key order."""
    return json.dumps(record, cls=EnhancedJSONEncoder, ensure_ascii=False)


def dump_jsonl(records: Iterable[Any], output_path: Path) -> int:
    """Write records to a JSON-lines file, one record per line.

    Args:
        records: Records to write (dicts, pydantic models, ...).
        output_path: Destination file; its parent directory must exist.

    Returns:
        Number of records written.
    """
    count = 0
    with output_path.open("w", encoding="utf-8") as f:
        for record in records:
            f.write(dumps(record))
            f.write("\n")
            count += 1
    return count


def append_jsonl(record: Any, output_path: Path):
    """Append one record to a JSON-lines file."""
    with output_path.open("a", encoding="utf-8") as f:
        f.write(dumps(record))
        f.write("\n")


def load_jsonl_records(input_path: Path) -> list[dict]:
    """Load every line of a JSON-lines file as a dictionary.

    Raises:
        json.JSONDecodeError: If a line is not valid JSON.
    """
    with input_path.open("r", encoding="utf-8") as f:
        return [json.loads(line) for line in f if line.strip()]
