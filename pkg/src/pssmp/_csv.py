"""Byte-deterministic CSV output: shortest round-trip float text, fixed row order."""
from __future__ import annotations

import os
from typing import Iterable, Sequence

import numpy as np


def format_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(v)
    if isinstance(v, str):
        return v
    if v is None:
        return ""
    return repr(float(v))


def render(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    lines = [",".join(header)]
    lines += [",".join(format_value(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def write_csv(path: str | os.PathLike, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(render(header, rows))
