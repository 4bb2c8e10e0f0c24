# SPDX-FileCopyrightText: 2024 dyadic-discrepancy developers
# SPDX-License-Identifier: MIT

"""Point distributions :math:`\\mathcal{A}_N \\subset [0, 1)^d`.

Random points are drawn from :class:`numpy.random.PCG64` (the 64-bit permuted
congruential generator), seeded explicitly, so the same seed always gives the
same stream on every platform. Halton points use the unscrambled radical
inverses from :class:`scipy.stats.qmc.Halton`.
"""

from __future__ import annotations

import pathlib
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import numpy.typing as npt

from dyadic_discrepancy.logging import get_logger

log = get_logger(__name__)

FAMILIES = ("vdc", "halton", "random")
"""Names of the generated point families."""


# {{{ errors


class PointSetParseError(ValueError):
    """Raised when a points file is malformed."""

    def __init__(self, filename: str | pathlib.Path, lineno: int, msg: str) -> None:
        super().__init__(f"{filename}:{lineno}: {msg}")
        self.filename = filename
        self.lineno = lineno


class UnsupportedDimensionError(ValueError):
    """Raised when a generator does not support the requested dimension."""


# }}}


# {{{ point set


@dataclass(frozen=True, eq=False)
class PointSet:
    """A set of :math:`N \\ge 1` points in the half-open cube :math:`[0, 1)^d`."""

    points: npt.NDArray[np.float64]
    """An array of shape ``(N, d)``."""
    meta: dict[str, Any] = field(default_factory=dict)
    """Provenance of the points: generator name, its parameters and seed."""

    def __post_init__(self) -> None:
        points = np.asarray(self.points, dtype=np.float64)
        if points.ndim != 2 or points.shape[1] < 1:
            raise ValueError(f"Points must be an array of shape (N, d): {points.shape}")

        if points.shape[0] < 1:
            raise ValueError("A point set must contain at least one point")

        if not np.all((points >= 0.0) & (points < 1.0)):
            raise ValueError("Point coordinates must be in [0, 1)")

        object.__setattr__(self, "points", points)

    @property
    def dim(self) -> int:
        return int(self.points.shape[1])

    @property
    def npoints(self) -> int:
        return int(self.points.shape[0])

    def __len__(self) -> int:
        return self.npoints

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PointSet):
            return NotImplemented

        return (
            self.points.shape == other.points.shape
            and bool(np.array_equal(self.points, other.points))
        )

    __hash__ = None  # type: ignore[assignment]


# }}}


# {{{ generators


def gen_random(npoints: int, dim: int, seed: int = 0) -> PointSet:
    """Draw *npoints* independent uniform points from a seeded PCG64 stream."""
    if npoints < 1:
        raise ValueError(f"Number of points must be positive: '{npoints}'")

    if dim < 1:
        raise ValueError(f"Dimension must be positive: '{dim}'")

    rng = np.random.Generator(np.random.PCG64(seed))
    points = rng.random((npoints, dim))

    return PointSet(
        points,
        meta={"family": "random", "N": npoints, "d": dim, "seed": seed,
              "generator": "PCG64"},
    )


def bit_reverse(i: npt.NDArray[np.int64], nbits: int) -> npt.NDArray[np.int64]:
    """Reverse the lowest *nbits* bits of each entry of *i*."""
    result = np.zeros_like(i)
    for b in range(nbits):
        result |= ((i >> b) & 1) << (nbits - 1 - b)

    return result


def gen_vandercorput(m: int) -> PointSet:
    """The two-dimensional van der Corput set with :math:`N = 2^m` points.

    The points are :math:`(i 2^{-m}, \\rho_m(i) 2^{-m})`, where :math:`\\rho_m`
    reverses the *m* binary digits of *i*. Every dyadic rectangle of volume
    :math:`2^{-m}` contains exactly one point.
    """
    if m < 0:
        raise ValueError(f"Level must be non-negative: '{m}'")

    i = np.arange(1 << m, dtype=np.int64)
    scale = 1.0 / (1 << m)
    points = np.stack([i * scale, bit_reverse(i, m) * scale], axis=1)

    return PointSet(points, meta={"family": "vdc", "m": m, "N": 1 << m, "d": 2})


def gen_halton(npoints: int, dim: int) -> PointSet:
    """The first *npoints* Halton points (indices :math:`1, \\dots, N`)."""
    from scipy.stats import qmc

    from dyadic_discrepancy.config import HALTON_PRIMES

    if npoints < 1:
        raise ValueError(f"Number of points must be positive: '{npoints}'")

    if dim < 1:
        raise ValueError(f"Dimension must be positive: '{dim}'")

    if dim > len(HALTON_PRIMES):
        raise UnsupportedDimensionError(
            f"Halton points are supported for d <= {len(HALTON_PRIMES)}: got '{dim}'"
        )

    # NOTE: index 0 is the origin, which is skipped
    sampler = qmc.Halton(d=dim, scramble=False)
    sampler.fast_forward(1)
    points = sampler.random(npoints)

    return PointSet(
        points,
        meta={"family": "halton", "N": npoints, "d": dim,
              "bases": list(HALTON_PRIMES[:dim])},
    )


def generate(family: str, npoints: int, dim: int, *, seed: int = 0) -> PointSet:
    """Generate a point set of the given *family* (one of :data:`FAMILIES`).

    For ``"vdc"``, *npoints* must be a power of two and *dim* must be 2.
    """
    if family == "random":
        return gen_random(npoints, dim, seed=seed)
    elif family == "halton":
        return gen_halton(npoints, dim)
    elif family == "vdc":
        if dim != 2:
            raise UnsupportedDimensionError(
                f"van der Corput points are two-dimensional: got '{dim}'"
            )
        if npoints < 1 or npoints & (npoints - 1):
            raise ValueError(
                f"van der Corput sets have a power of two points: got '{npoints}'"
            )
        return gen_vandercorput(npoints.bit_length() - 1)
    else:
        raise ValueError(
            f"Unknown point family '{family}'. Known families are "
            f"'{', '.join(FAMILIES)}'"
        )


# }}}


# {{{ input / output


def format_points(pointset: PointSet) -> str:
    """Text form of *pointset*: a ``d N`` header and one point per line."""
    lines = [f"{pointset.dim} {pointset.npoints}"]
    lines.extend(" ".join(f"{x:.17g}" for x in p) for p in pointset.points.tolist())

    return "\n".join(lines) + "\n"


def save_points(pointset: PointSet, filename: str | pathlib.Path) -> None:
    with open(filename, "w", encoding="utf-8") as outf:
        outf.write(format_points(pointset))

    log.info("Saved %d points in '%s'.", pointset.npoints, filename)


def _parse_coordinate(
    filename: str | pathlib.Path, lineno: int, word: str
) -> float:
    try:
        x = float(word)
    except ValueError:
        raise PointSetParseError(
            filename, lineno, f"invalid coordinate '{word}'"
        ) from None

    if not 0.0 <= x < 1.0:
        raise PointSetParseError(
            filename, lineno, f"coordinate '{word}' is not in [0, 1)"
        )

    return x


def load_points(filename: str | pathlib.Path) -> PointSet:
    """Read a points file written by :func:`save_points`.

    Blank lines are ignored; every error names the offending line.
    """
    filename = pathlib.Path(filename)
    with open(filename, encoding="utf-8") as inf:
        lines = [
            (lineno, line.split())
            for lineno, line in enumerate(inf, start=1)
            if line.strip()
        ]

    if not lines:
        raise PointSetParseError(filename, 1, "missing '<d> <N>' header")

    lineno, header = lines[0]
    try:
        dim, npoints = (int(w) for w in header)
    except ValueError:
        raise PointSetParseError(
            filename, lineno, f"malformed header '{' '.join(header)}'"
        ) from None

    if dim < 1 or npoints < 1:
        raise PointSetParseError(
            filename, lineno, f"header must have d >= 1 and N >= 1: '{dim} {npoints}'"
        )

    body = lines[1:]
    if len(body) != npoints:
        lineno = body[-1][0] if body else lineno
        raise PointSetParseError(
            filename, lineno, f"expected {npoints} points but found {len(body)}"
        )

    points = np.empty((npoints, dim), dtype=np.float64)
    for i, (lineno, words) in enumerate(body):
        if len(words) != dim:
            raise PointSetParseError(
                filename, lineno, f"expected {dim} coordinates but found {len(words)}"
            )

        points[i] = [_parse_coordinate(filename, lineno, w) for w in words]

    log.info("Loaded %d points in dimension %d from '%s'.", npoints, dim, filename)
    return PointSet(points, meta={"family": "file", "path": str(filename),
                                  "N": npoints, "d": dim})


# }}}
