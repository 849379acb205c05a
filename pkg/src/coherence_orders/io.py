"""Text formats: matrix files, delimited tables and their JSON mirror.

Matrix files hold one row per line with whitespace-separated complex
entries written ``re+imj`` (Python ``complex`` syntax; plain reals are
accepted). Blank lines and lines starting with ``#`` are ignored.

Tables are CSV with a ``#``-prefixed header carrying the resolved
parameters and the library version, a column-name line, then rows.
Floats use 17 significant digits so values survive a round trip.
"""

from __future__ import annotations

import csv
import io as _io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .errors import GoldenMismatch, ParseError
from .states import validate_state


# --------------------------------------------------------------------------
# matrices


def format_complex(z: complex) -> str:
    z = complex(z)
    return f"{z.real:.17g}{z.imag:+.17g}j"


def write_matrix(path, rho) -> None:
    m = np.asarray(rho, dtype=complex)
    lines = [" ".join(format_complex(v) for v in row) for row in m]
    Path(path).write_text("\n".join(lines) + "\n")


def parse_matrix(text: str, source: str = "<string>") -> np.ndarray:
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            rows.append([complex(tok) for tok in line.replace(",", " ").split()])
        except ValueError as exc:
            raise ParseError(f"{source}:{lineno}: cannot parse complex entry ({exc})") from None
    if not rows:
        raise ParseError(f"{source}: no matrix rows found")
    width = {len(r) for r in rows}
    if len(width) != 1 or width.pop() != len(rows):
        raise ParseError(f"{source}: matrix is not square ({len(rows)} rows, row lengths {sorted({len(r) for r in rows})})")
    return np.array(rows, dtype=complex)


def read_state(path) -> np.ndarray:
    """Load a density matrix and validate it (Hermitian, trace one, PSD)."""
    p = Path(path)
    m = parse_matrix(p.read_text(), source=str(p))
    return validate_state(m)


# --------------------------------------------------------------------------
# tables


@dataclass
class Table:
    """A named rectangular result with the parameters that produced it."""

    name: str
    columns: list[str]
    rows: list[tuple]
    params: dict[str, Any] = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([r[i] for r in self.rows])

    @classmethod
    def from_arrays(cls, name: str, data: dict[str, Sequence], params: dict | None = None) -> "Table":
        cols = list(data)
        rows = list(zip(*(list(v) for v in data.values())))
        return cls(name, cols, rows, dict(params or {}))


def format_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if v == 0:
            return "0"  # folds -0.0
        return f"{v:.17g}"
    return str(v)


def _param_text(v) -> str:
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_param_text(x) for x in v) + "]"
    return format_value(v)


def table_to_csv(table: Table, version: str) -> str:
    buf = _io.StringIO()
    buf.write(f"# table: {table.name}\n")
    buf.write(f"# version: {version}\n")
    for k in sorted(table.params):
        buf.write(f"# {k}: {_param_text(table.params[k])}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for row in table.rows:
        w.writerow([format_value(v) for v in row])
    return buf.getvalue()


def table_to_json(table: Table, version: str) -> str:
    def clean(v):
        if isinstance(v, (bool, np.bool_)):
            return bool(v)
        if isinstance(v, (int, np.integer)):
            return int(v)
        if isinstance(v, (float, np.floating)):
            return None if math.isnan(v) else float(v)
        if isinstance(v, (list, tuple)):
            return [clean(x) for x in v]
        return v

    doc = {
        "table": table.name,
        "version": version,
        "params": {k: clean(table.params[k]) for k in sorted(table.params)},
        "columns": table.columns,
        "rows": [[clean(v) for v in r] for r in table.rows],
    }
    return json.dumps(doc, indent=1) + "\n"


def write_table(table: Table, out_dir, fmt: str, version: str) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if fmt == "csv":
        path = out / f"{table.name}.csv"
        path.write_text(table_to_csv(table, version))
    elif fmt == "json":
        path = out / f"{table.name}.json"
        path.write_text(table_to_json(table, version))
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return path


def read_csv_table(path) -> tuple[dict[str, str], list[str], list[list[str]]]:
    """Parse a table file into (header params, column names, raw rows)."""
    header: dict[str, str] = {}
    body = []
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            key, _, val = line[1:].partition(":")
            header[key.strip()] = val.strip()
        elif line:
            body.append(line)
    if not body:
        raise ParseError(f"{path}: no column header")
    rows = list(csv.reader(body))
    return header, rows[0], rows[1:]


def _cell_equal(a: str, b: str, tol: float) -> bool:
    try:
        x, y = float(a), float(b)
    except ValueError:
        return a == b
    if math.isnan(x) or math.isnan(y):
        return math.isnan(x) and math.isnan(y)
    return abs(x - y) <= tol * max(1.0, abs(y))


def compare_tables(produced, golden, tol: float = 1e-9) -> list[str]:
    """Cells of ``produced`` that differ from ``golden`` beyond ``tol``.

    Numbers are compared with a tolerance relative to max(1, |golden|);
    everything else must match exactly.
    """
    _, cols_p, rows_p = read_csv_table(produced)
    _, cols_g, rows_g = read_csv_table(golden)
    name = Path(golden).name
    if cols_p != cols_g:
        return [f"{name}: columns {cols_p} != {cols_g}"]
    if len(rows_p) != len(rows_g):
        return [f"{name}: {len(rows_p)} rows != {len(rows_g)}"]
    bad = []
    for i, (rp, rg) in enumerate(zip(rows_p, rows_g)):
        for c, a, b in zip(cols_g, rp, rg):
            if not _cell_equal(a, b, tol):
                bad.append(f"{name}: row {i + 1}, column {c}: {a} != golden {b}")
    return bad


def check_goldens(pairs, tol: float = 1e-9) -> None:
    """Raise :class:`GoldenMismatch` if any (produced, golden) pair drifts."""
    bad = []
    for produced, golden in pairs:
        if not Path(golden).exists():
            bad.append(f"{Path(golden).name}: golden file missing")
            continue
        bad.extend(compare_tables(produced, golden, tol))
    if bad:
        raise GoldenMismatch(bad)
