# SPDX-FileCopyrightText: 2024 dyadic-discrepancy developers
# SPDX-License-Identifier: MIT

from __future__ import annotations

import json
import math
import pathlib
import time
from collections.abc import Iterator
from contextlib import contextmanager
from typing import Any

import numpy as np
import numpy.typing as npt

from dyadic_discrepancy.logging import get_logger

log = get_logger(__name__)


# {{{ reductions


def pairwise_sum(values: npt.ArrayLike) -> float:
    """Sum all the entries of *values* in a fixed order.

    The array is flattened to a contiguous C-ordered vector first. On such
    arrays :func:`numpy.sum` uses a pairwise summation tree whose shape only
    depends on the length of the vector, so the result is identical from run
    to run.
    """
    ary = np.ascontiguousarray(values, dtype=np.float64).ravel()
    return float(np.sum(ary))


def relative_difference(a: float, b: float) -> float:
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0.0 else abs(a - b) / scale


# }}}


# {{{ timing


class Timer:
    """Wall-clock timer used for the optional timing fields of reports."""

    def __init__(self) -> None:
        self.t_start: float = 0.0
        self.t_end: float = 0.0

    @property
    def elapsed(self) -> float:
        """Elapsed time in seconds."""
        return self.t_end - self.t_start

    @property
    def elapsed_ms(self) -> float:
        return 1000.0 * self.elapsed


@contextmanager
def timeit(name: str | None = None) -> Iterator[Timer]:
    timer = Timer()
    timer.t_start = time.perf_counter()
    try:
        yield timer
    finally:
        timer.t_end = time.perf_counter()
        if name is not None:
            log.info("%s (%.3fs)", name, timer.elapsed)


# }}}


# {{{ serialization


def to_jsonable(obj: Any) -> Any:
    """Convert numpy scalars, arrays, tuples and non-finite floats to JSON types.

    Non-finite floats are written as ``null`` so that the output is strict JSON.
    """
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        return value if math.isfinite(value) else None

    return obj


def dump_json(data: Any, outfile: str | pathlib.Path | None = None) -> str:
    """Serialize *data* with sorted keys; write it to *outfile* if given."""
    text = json.dumps(to_jsonable(data), indent=2, sort_keys=True, allow_nan=False)
    if outfile is not None:
        with open(outfile, "w", encoding="utf-8") as outf:
            outf.write(text)
            outf.write("\n")

        log.info("Report saved in '%s'.", outfile)

    return text


# }}}
