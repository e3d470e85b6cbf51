from __future__ import annotations

import json
import math
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Iterable, Iterator

import numpy as np

from ..core.exceptions import LabIOError

NON_FINITE_TEXT = "non-finite"


def _convert(data: Any) -> Any:
    if isinstance(data, dict):
        return {str(key): _convert(value) for key, value in data.items()}

    if isinstance(data, (list, tuple)):
        return [_convert(item) for item in data]

    if isinstance(data, np.ndarray):
        return _convert(data.tolist())

    if isinstance(data, np.generic):
        return _convert(data.item())

    if isinstance(data, float) and not math.isfinite(data):
        return NON_FINITE_TEXT

    if isinstance(data, Path):
        return str(data)

    return data


def to_jsonable(data: Any) -> Any:
    """
    Recursively convert numpy arrays/scalars, tuples and paths into JSON-native values.

    Non-finite floats are replaced by a marker string so log lines and reports stay valid JSON.
    """
    return _convert(data)


def dumps_line(record: Any) -> str:
    """One NDJSON line with stable key order as given by the caller."""
    return json.dumps(to_jsonable(record), ensure_ascii=False, separators=(",", ":"))


@contextmanager
def _writing(path: Path) -> Iterator[None]:
    try:
        yield
    except OSError as exc:
        raise LabIOError(f"Cannot write {path}", payload={"error": str(exc)}) from exc


def write_ndjson(path: Path, records: Iterable[Any]) -> None:
    with _writing(path):
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8") as fh:
            for record in records:
                fh.write(dumps_line(record))
                fh.write("\n")


def write_json(path: Path, payload: Any) -> None:
    with _writing(path):
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(to_jsonable(payload), indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


def append_ndjson(path: Path, record: Any) -> None:
    with _writing(path), path.open("a", encoding="utf-8") as fh:
        fh.write(dumps_line(record))
        fh.write("\n")
