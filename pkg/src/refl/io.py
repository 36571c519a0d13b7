"""Plain-text reflectivity files and atomic output writes."""

from __future__ import annotations

import os
import re
import tempfile
import warnings
from pathlib import Path
from typing import Mapping, Union

import numpy as np

from refl.inference import Dataset
from refl.kernel import ReflectivityCurve

_SPLIT = re.compile(r"[,\s]+")


class DataParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)
        self.line = line
        self.column = column


class NonNumericFieldError(DataParseError):
    pass


class TooFewColumnsError(DataParseError):
    pass


class InconsistentColumnsError(DataParseError):
    pass


class NonPositiveQError(DataParseError):
    pass


class NonPositiveUncertaintyError(DataParseError):
    pass


class DuplicateQError(DataParseError):
    pass


def parse_reflectivity_text(text: str) -> Union[Dataset, ReflectivityCurve]:
    """
    Parse columns ``q R [dR] [extras...]``.

    Whitespace and commas both delimit fields; blank lines and lines starting
    with '#' are skipped. Rows are returned sorted by q. A dataset is
    returned when a dR column is present, a bare curve otherwise.
    """
    rows = []
    line_nos = []
    ncols = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = [f for f in _SPLIT.split(line) if f]
        if len(fields) < 2:
            raise TooFewColumnsError(
                f"expected at least 2 columns (q, R), found {len(fields)}", lineno
            )
        if ncols is None:
            ncols = len(fields)
        elif len(fields) != ncols:
            raise InconsistentColumnsError(
                f"expected {ncols} columns like the first data row, found {len(fields)}", lineno
            )
        values = []
        for col, f in enumerate(fields, start=1):
            try:
                values.append(float(f))
            except ValueError:
                raise NonNumericFieldError(f"non-numeric field {f!r}", lineno, col) from None
        rows.append(values)
        line_nos.append(lineno)

    if not rows:
        raise DataParseError("no data rows found")
    data = np.array(rows, dtype=float)
    line_nos = np.array(line_nos)

    q = data[:, 0]
    bad = np.flatnonzero(~(q > 0) | ~np.isfinite(q))
    if bad.size:
        raise NonPositiveQError(f"q must be positive and finite, got {q[bad[0]]}", int(line_nos[bad[0]]), 1)
    if data.shape[1] >= 3:
        dr = data[:, 2]
        bad = np.flatnonzero(~(dr > 0) | ~np.isfinite(dr))
        if bad.size:
            raise NonPositiveUncertaintyError(
                f"dR must be positive and finite, got {dr[bad[0]]}", int(line_nos[bad[0]]), 3
            )
    if data.shape[1] >= 4:
        warnings.warn(
            "columns beyond the third (e.g. resolution) are ignored; no smearing is applied",
            stacklevel=2,
        )

    order = np.argsort(q, kind="stable")
    data = data[order]
    line_nos = line_nos[order]
    dup = np.flatnonzero(np.diff(data[:, 0]) == 0)
    if dup.size:
        i = dup[0]
        raise DuplicateQError(
            f"duplicate q = {data[i, 0]} (also on line {line_nos[i]})", int(line_nos[i + 1]), 1
        )

    if data.shape[1] >= 3:
        return Dataset.from_arrays(data[:, 0], data[:, 1], data[:, 2])
    return ReflectivityCurve(data[:, 0], data[:, 1])


def read_reflectivity_file(path) -> Union[Dataset, ReflectivityCurve]:
    text = Path(path).read_text(encoding="utf-8")
    return parse_reflectivity_text(text)


def format_columns(columns: Mapping[str, np.ndarray], comment: str | None = None) -> str:
    names = list(columns)
    arrays = [np.asarray(columns[n], dtype=float) for n in names]
    lines = []
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    lines.append("# " + " ".join(names))
    for row in zip(*arrays):
        lines.append(" ".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def atomic_write_bytes(path, data: bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_text(path, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


def write_columns(path, columns: Mapping[str, np.ndarray], comment: str | None = None) -> None:
    atomic_write_text(path, format_columns(columns, comment))


def write_dataset(path, dataset: Dataset, comment: str | None = None) -> None:
    write_columns(path, {"q": dataset.q, "R": dataset.r, "dR": dataset.dr}, comment)
