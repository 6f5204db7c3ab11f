"""CSV emission with a fixed significant-digit policy and a provenance header."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from importlib import metadata
from pathlib import Path

import numpy as np

from .montecarlo import Check, Table

PACKAGE = "artifact"


def package_version() -> str:
    try:
        return metadata.version(PACKAGE)
    except metadata.PackageNotFoundError:
        from . import __version__
        return __version__


@dataclass(frozen=True)
class Provenance:
    config_hash: str
    seed: int | None
    version: str
    command: str

    def lines(self) -> list[str]:
        return [f"# command: {self.command}",
                f"# config_sha256: {self.config_hash}",
                f"# seed: {'none' if self.seed is None else self.seed}",
                f"# version: {PACKAGE} {self.version}"]


def format_value(value, digits: int = 10) -> str:
    """Integers verbatim, floats in ``%.<digits>g``, everything else via ``str``."""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.{digits}g}"
    return str(value)


def render_csv(columns, rows, provenance: Provenance | None = None, digits: int = 10) -> str:
    buf = io.StringIO()
    if provenance is not None:
        for line in provenance.lines():
            buf.write(line + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(v, digits) for v in row])
    return buf.getvalue()


def write_table(directory: Path, table: Table, provenance: Provenance, digits: int = 10) -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"{table.name}.csv"
    path.write_text(render_csv(table.columns, table.rows, provenance, digits), encoding="utf-8")
    return path


def read_csv(path: Path) -> tuple[list[str], list[list[str]]]:
    """Header and rows of a CSV written by :func:`write_table`, comments skipped."""
    with open(path, encoding="utf-8") as fh:
        reader = csv.reader(line for line in fh if not line.startswith("#"))
        header = next(reader)
        return header, list(reader)


def write_assertions(directory: Path, kind: str, checks: list[Check], provenance: Provenance) -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    report = {
        "kind": kind,
        "passed": all(c.passed for c in checks),
        "config_sha256": provenance.config_hash,
        "seed": provenance.seed,
        "version": provenance.version,
        "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in checks],
    }
    path = directory / "assertions.json"
    path.write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
    return path
