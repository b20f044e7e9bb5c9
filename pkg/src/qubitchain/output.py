"""Result rows and their CSV / JSON-lines serialisation."""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional

FORMATS = ("csv", "jsonl")
ROW_KEYS = ("grid_index", "ensemble_index", "axis", "grid_value")


class OutputError(OSError):
    """Failure writing results, with the path involved."""


@dataclass(frozen=True)
class ResultRow:
    """One observable value (or value group) for one parameter point.

    ``params`` is the full parameter echo, enough to rebuild the point.
    """

    params: Dict[str, Any]
    observable: str
    values: Dict[str, Any] = field(default_factory=dict)
    grid_index: int = 0
    ensemble_index: int = 0
    axis: str = ""
    grid_value: Any = None
    wall_time: float = 0.0

    def flat(self, timing: bool = False) -> Dict[str, Any]:
        out = {"grid_index": self.grid_index, "ensemble_index": self.ensemble_index,
               "axis": self.axis, "grid_value": self.grid_value}
        out.update(self.params)
        out["observable"] = self.observable
        out.update(self.values)
        if timing:
            out["wall_time"] = self.wall_time
        return out


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _columns(flats: Iterable[Mapping[str, Any]]) -> List[str]:
    cols: Dict[str, None] = {}
    for f in flats:
        for k in f:
            cols.setdefault(k, None)
    return list(cols)


def emit(rows: List[ResultRow], fmt: str = "csv", meta: Optional[Mapping[str, Any]] = None,
         timing: bool = False) -> bytes:
    """Serialise rows.

    CSV: ``# key=value`` comment lines from ``meta``, one column header
    (union of all row fields in first-seen order), then one line per row.
    Floats are written with 17 significant digits.  JSON-lines uses the
    same field names, one object per line, with the meta block first.
    Wall times are left out unless ``timing`` is set, so repeated runs
    produce identical bytes.
    """
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}")
    if meta is None:
        meta = {"format": "qubitchain-rows-v1"}
    flats = [r.flat(timing) for r in rows]
    buf = io.StringIO()
    if fmt == "csv":
        for k, v in meta.items():
            buf.write(f"# {k}={format_value(v)}\n")
        cols = _columns(flats)
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for f in flats:
            w.writerow([format_value(f.get(c)) for c in cols])
    else:
        buf.write(json.dumps({"meta": dict(meta)}, sort_keys=False) + "\n")
        for f in flats:
            buf.write(json.dumps(f) + "\n")
    return buf.getvalue().encode()


def _parse_scalar(text: str):
    if text == "":
        return None
    if text in ("true", "false"):
        return text == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def read_csv(data: bytes):
    """Parse emitted CSV back into (meta, list of flat dicts)."""
    lines = data.decode().splitlines()
    meta = {}
    i = 0
    while i < len(lines) and lines[i].startswith("#"):
        k, _, v = lines[i][1:].strip().partition("=")
        meta[k] = _parse_scalar(v)
        i += 1
    reader = csv.reader(lines[i:])
    header = next(reader)
    rows = [{k: _parse_scalar(v) for k, v in zip(header, rec) if v != ""} for rec in reader]
    return meta, rows


def read_jsonl(data: bytes):
    """Parse emitted JSON lines back into (meta, list of ResultRow)."""
    lines = [ln for ln in data.decode().splitlines() if ln.strip()]
    meta = json.loads(lines[0])["meta"]
    rows = [row_from_flat(json.loads(ln)) for ln in lines[1:]]
    return meta, rows


def row_from_flat(flat: Mapping[str, Any], param_keys: Optional[Iterable[str]] = None) -> ResultRow:
    """Rebuild a ResultRow from a flat record produced by :meth:`ResultRow.flat`."""
    keys = list(flat)
    obs_at = keys.index("observable")
    params = {k: flat[k] for k in keys[:obs_at] if k not in ROW_KEYS}
    values = {k: flat[k] for k in keys[obs_at + 1:] if k != "wall_time"}
    return ResultRow(params=params, observable=flat["observable"], values=values,
                     grid_index=flat["grid_index"], ensemble_index=flat["ensemble_index"],
                     axis=flat["axis"], grid_value=flat["grid_value"],
                     wall_time=flat.get("wall_time", 0.0))


def write_atomic(path, data: bytes, overwrite: bool = False) -> Path:
    """Write ``data`` to ``path`` via a temporary file and rename.

    Refuses to replace an existing file unless ``overwrite``.
    """
    path = Path(path)
    try:
        if path.exists() and not overwrite:
            raise OutputError(f"{path}: output exists (use --overwrite to replace it)")
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(data)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    except OutputError:
        raise
    except OSError as exc:
        raise OutputError(f"{path}: {exc.strerror or exc}") from exc
    return path

