"""Loading and validation of experiment output directories."""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass
from pathlib import Path

EXPECTED_HEADER = ["experiment", "family", "law", "n", "replicate", "seed",
                   "value"]


class PlotsError(Exception):
    """Base error for figure rendering."""


class SchemaError(PlotsError):
    """A file does not match the documented schema."""


class HashMismatchError(PlotsError):
    """samples.csv and summary.json do not belong together."""


@dataclass
class SampleRow:
    experiment: str
    family: str
    law: str
    n: int
    replicate: int
    seed: int
    value: float


@dataclass
class ResultBundle:
    rows: list[SampleRow]
    summary: dict

    def n_values(self) -> list[int]:
        return sorted({r.n for r in self.rows})

    def values_at(self, n: int):
        return [r.value for r in self.rows if r.n == n]


def _config_hash(config: dict) -> str:
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def _parse_rows(data: bytes) -> list[SampleRow]:
    text = data.decode("utf-8")
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError("samples.csv is empty")
    if header != EXPECTED_HEADER:
        raise SchemaError(
            f"samples.csv header mismatch: expected {EXPECTED_HEADER}, "
            f"got {header}")
    rows = []
    for lineno, cells in enumerate(reader, start=2):
        if not cells:
            continue
        if len(cells) != len(EXPECTED_HEADER):
            raise SchemaError(
                f"samples.csv line {lineno}: expected "
                f"{len(EXPECTED_HEADER)} columns, got {len(cells)}")
        try:
            rows.append(SampleRow(
                experiment=cells[0], family=cells[1], law=cells[2],
                n=int(cells[3]), replicate=int(cells[4]),
                seed=int(cells[5]), value=float(cells[6])))
        except ValueError as exc:
            raise SchemaError(f"samples.csv line {lineno}: {exc}")
    return rows


def load_results(dir_path) -> ResultBundle:
    """Validated bundle from a directory holding samples.csv + summary.json.

    Checks the CSV schema, the CSV content hash recorded in the summary,
    the summary's own config hash, and the consistency of the per-level
    sample sets between the two files.
    """
    dir_path = Path(dir_path)
    csv_path = dir_path / "samples.csv"
    summary_path = dir_path / "summary.json"
    for p in (csv_path, summary_path):
        if not p.is_file():
            raise SchemaError(f"missing {p.name} in {dir_path}")
    data = csv_path.read_bytes()
    try:
        summary = json.loads(summary_path.read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"summary.json is not valid JSON: {exc}")
    if not isinstance(summary, dict):
        raise SchemaError("summary.json must hold a JSON object")
    for key in ("config", "config_hash", "samples_sha256"):
        if key not in summary:
            raise SchemaError(f"summary.json is missing '{key}'")
    actual = hashlib.sha256(data).hexdigest()
    if actual != summary["samples_sha256"]:
        raise HashMismatchError(
            "samples.csv does not match the hash recorded in summary.json")
    if _config_hash(summary["config"]) != summary["config_hash"]:
        raise HashMismatchError(
            "summary.json config echo does not match its config hash")
    rows = _parse_rows(data)
    stats = summary.get("stats")
    if stats is not None:
        summary_ns = {int(k) for k in stats}
        sample_ns = {r.n for r in rows}
        if summary_ns != sample_ns:
            raise SchemaError(
                f"level sets disagree: summary has {sorted(summary_ns)}, "
                f"samples have {sorted(sample_ns)}")
    return ResultBundle(rows=rows, summary=summary)
