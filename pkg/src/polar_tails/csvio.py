"""CSV with a leading manifest comment line: `# manifest: <model-hash> <seed> <version>`."""
from __future__ import annotations

import csv
import io
import math
from pathlib import Path
from typing import Iterable, List, NamedTuple, Optional, Sequence, Tuple

PREFIX = "# manifest:"


class Manifest(NamedTuple):
    model_hash: str
    seed: Optional[int]
    version: str


def fmt(value) -> str:
    if isinstance(value, str):
        return value
    v = float(value)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(v, ".17g")


def render(header: Sequence[str], rows: Iterable[Sequence], model_hash: str, seed, version: str) -> str:
    buf = io.StringIO()
    buf.write(f"{PREFIX} {model_hash} {'-' if seed is None else seed} {version}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write_csv(path, header, rows, model_hash: str, seed, version: str) -> None:
    text = render(header, rows, model_hash, seed, version)
    if path is None or str(path) == "-":
        import sys

        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def parse_manifest(line: str) -> Manifest:
    parts = line[len(PREFIX):].split()
    if len(parts) != 3:
        raise ValueError(f"malformed manifest line: {line.strip()}")
    seed = None if parts[1] == "-" else int(parts[1])
    return Manifest(parts[0], seed, parts[2])


def read_csv(path) -> Tuple[Optional[Manifest], List[str], List[List[str]]]:
    manifest = None
    header = None
    rows = []
    with open(path, newline="") as fh:
        for line in fh:
            stripped = line.strip()
            if not stripped:
                continue
            if stripped.startswith("#"):
                if stripped.startswith(PREFIX) and manifest is None and header is None:
                    manifest = parse_manifest(stripped)
                continue
            fields = next(csv.reader([stripped]))
            if header is None:
                header = [f.strip() for f in fields]
            else:
                rows.append([f.strip() for f in fields])
    if header is None:
        raise ValueError(f"{path}: no header row")
    return manifest, header, rows
