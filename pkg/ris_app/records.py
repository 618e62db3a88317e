"""Escritura/lectura de CSV y sidecars JSON de cada corrida."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable, Sequence

FEASGRID_HEADER = ("re", "im", "residual", "feasible")
TRANSITION_HEADER = ("m", "k", "n", "direct", "trials", "successes", "prob")
PERCENTILE_HEADER = ("k", "level", "n_first", "n_interp")


def format_cell(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_cell(v) for v in row])
    return path


def read_csv(path: Path, header: Sequence[str]) -> list[dict]:
    path = Path(path)
    with path.open("r", newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = [col for col in header if col not in (reader.fieldnames or [])]
        if missing:
            raise ValueError(f"{path}: faltan columnas {', '.join(missing)}")
        return list(reader)


def write_metadata(path: Path, meta: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = json.dumps(meta, ensure_ascii=False, indent=2, sort_keys=True, default=str)
    path.write_text(payload + "\n", encoding="utf-8")
    return path


def read_json(path: Path) -> dict:
    path = Path(path)
    data = json.loads(path.read_text(encoding="utf-8") or "{}")
    if not isinstance(data, dict):
        raise ValueError(f"{path}: se esperaba un objeto JSON")
    return data


class JsonLinesWriter:
    """Callback para el stream de diagnóstico del solver (una línea JSON por iteración externa)."""

    def __init__(self, path: Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._fh = self.path.open("w", encoding="utf-8")

    def __call__(self, record: dict) -> None:
        self._fh.write(json.dumps(record, sort_keys=True) + "\n")

    def close(self) -> None:
        self._fh.close()

    def __enter__(self) -> "JsonLinesWriter":
        return self

    def __exit__(self, *exc) -> None:
        self.close()
