"""Time-series container shared by the integrators, with CSV export.

Complex columns are split into `re_<name>,im_<name>` on write; floats are
printed with 17 significant digits so CSV round-trips are exact and output
is byte-deterministic for identical inputs.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass, field

import numpy as np


def _fmt(x: float) -> str:
    return f"{x:.17g}"


@dataclass
class Trajectory:
    """Ascending time grid plus named real/complex series of equal length."""

    times: np.ndarray
    columns: dict[str, np.ndarray]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.times)
        for name, col in self.columns.items():
            if len(col) != n:
                raise ValueError(f"column '{name}' has length {len(col)}, "
                                 f"expected {n}")

    def column(self, name: str) -> np.ndarray:
        if name not in self.columns:
            raise KeyError(f"trajectory has no column '{name}'; "
                           f"available: {sorted(self.columns)}")
        return self.columns[name]

    def header_names(self) -> list[str]:
        names = ["t"]
        for name, col in self.columns.items():
            if np.iscomplexobj(col):
                names += [f"re_{name}", f"im_{name}"]
            else:
                names.append(name)
        return names

    def to_csv(self, path) -> None:
        write_csv_atomic(path, self.header_names(), self.rows())

    def rows(self):
        for i in range(len(self.times)):
            row = [_fmt(self.times[i])]
            for col in self.columns.values():
                v = col[i]
                if np.iscomplexobj(col):
                    row += [_fmt(v.real), _fmt(v.imag)]
                else:
                    row.append(_fmt(v))
            yield row


def write_csv_atomic(path, header: list[str], rows) -> None:
    """Write CSV with LF line endings via temp file + rename."""
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n", encoding="utf-8") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(str(v) for v in row) + "\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
