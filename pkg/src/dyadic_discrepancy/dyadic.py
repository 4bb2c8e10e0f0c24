# SPDX-FileCopyrightText: 2024 dyadic-discrepancy developers
# SPDX-License-Identifier: MIT

"""Dyadic intervals and rectangles, Haar functions, hyperbolic shapes and the
piecewise-constant grid functions that every other module builds on.

All intervals are half-open :math:`[a, b)`, so a boundary point belongs to the
right sibling. Shape components are always :math:`\\ge 1` (the hyperbolic
families :math:`\\mathbb{H}^d_n \\subset \\{1, \\dots, n\\}^d`); level-zero sides
only appear in :class:`DyadicRectangle`.

Grid values are stored as a :math:`d`-dimensional C-ordered array, i.e. row-major
with coordinate 1 varying slowest, and the cell with multi-index
:math:`(j_1, \\dots, j_d)` is :math:`\\prod_t [j_t 2^{-m_t}, (j_t + 1) 2^{-m_t})`.
"""

from __future__ import annotations

import functools
import itertools
import math
from collections.abc import Callable, Iterator, Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np
import numpy.typing as npt

from dyadic_discrepancy.logging import get_logger
from dyadic_discrepancy.utils import pairwise_sum

log = get_logger(__name__)


# {{{ errors


class DimensionMismatchError(ValueError):
    """Raised when points, rectangles or grids of different dimensions meet."""


class ResolutionError(ValueError):
    """Raised when a grid would exceed the configured cap on its total level."""


def get_grid_max_level() -> int:
    from dyadic_discrepancy import config

    return config.getint("grid-max-level")


def check_resolution(
    resolution: Sequence[int], *, max_level: int | None = None
) -> tuple[int, ...]:
    """Validate a grid resolution :math:`(m_1, \\dots, m_d)` against the cap.

    :arg max_level: cap on :math:`m_1 + \\cdots + m_d`. If *None*, the
        ``grid-max-level`` setting is used.
    :returns: the resolution as a tuple.
    """
    resolution = tuple(int(m) for m in resolution)
    if not resolution:
        raise ValueError("Grid resolution must have at least one coordinate")

    if any(m < 0 for m in resolution):
        raise ValueError(f"Grid levels must be non-negative: '{resolution}'")

    if max_level is None:
        max_level = get_grid_max_level()

    total = sum(resolution)
    if total > max_level:
        raise ResolutionError(
            f"Grid resolution {resolution} has total level {total}, which "
            f"exceeds the cap of {max_level} (2^{max_level} cells). Use a coarser "
            "resolution, raise 'grid-max-level' or use a sampled estimator."
        )

    return resolution


# }}}


# {{{ intervals and rectangles


@dataclass(frozen=True, order=True)
class DyadicInterval:
    """The dyadic interval :math:`[j 2^{-k}, (j + 1) 2^{-k})`."""

    level: int
    """Level :math:`k \\ge 0`."""
    offset: int
    """Offset :math:`0 \\le j < 2^k`."""

    def __post_init__(self) -> None:
        if self.level < 0:
            raise ValueError(f"Level must be non-negative: '{self.level}'")

        if not 0 <= self.offset < (1 << self.level):
            raise ValueError(
                f"Offset must be in [0, 2^{self.level}): '{self.offset}'"
            )

    @property
    def length(self) -> float:
        return math.ldexp(1.0, -self.level)

    @property
    def left(self) -> float:
        return math.ldexp(self.offset, -self.level)

    @property
    def right(self) -> float:
        return math.ldexp(self.offset + 1, -self.level)

    @property
    def midpoint(self) -> float:
        return math.ldexp(2 * self.offset + 1, -self.level - 1)

    @property
    def left_half(self) -> DyadicInterval:
        return DyadicInterval(self.level + 1, 2 * self.offset)

    @property
    def right_half(self) -> DyadicInterval:
        return DyadicInterval(self.level + 1, 2 * self.offset + 1)

    def contains(self, x: float) -> bool:
        return self.left <= x < self.right


@dataclass(frozen=True, order=True)
class DyadicRectangle:
    """A product of dyadic intervals :math:`R_1 \\times \\cdots \\times R_d`."""

    sides: tuple[DyadicInterval, ...]

    def __post_init__(self) -> None:
        if not self.sides:
            raise ValueError("A dyadic rectangle must have at least one side")

    @classmethod
    def from_offsets(
        cls, levels: Sequence[int], offsets: Sequence[int]
    ) -> DyadicRectangle:
        if len(levels) != len(offsets):
            raise DimensionMismatchError(
                f"Got {len(levels)} levels and {len(offsets)} offsets"
            )

        return cls(tuple(DyadicInterval(k, j) for k, j in zip(levels, offsets)))

    @property
    def dim(self) -> int:
        return len(self.sides)

    @property
    def levels(self) -> tuple[int, ...]:
        return tuple(side.level for side in self.sides)

    @property
    def offsets(self) -> tuple[int, ...]:
        return tuple(side.offset for side in self.sides)

    @property
    def volume(self) -> float:
        return math.ldexp(1.0, -sum(self.levels))

    def contains(self, x: Sequence[float]) -> bool:
        _check_point_dim(self, x)
        return all(side.contains(xt) for side, xt in zip(self.sides, x))


def _check_point_dim(rect: DyadicRectangle, x: Sequence[float]) -> None:
    if len(x) != rect.dim:
        raise DimensionMismatchError(
            f"Point has dimension {len(x)} but rectangle has dimension {rect.dim}"
        )


def haar_eval(interval: DyadicInterval, x: float) -> int:
    """Evaluate :math:`h_I = -\\mathbf{1}_{I_{left}} + \\mathbf{1}_{I_{right}}`
    at *x*.
    """
    if not interval.contains(x):
        return 0

    return -1 if x < interval.midpoint else 1


def haar_eval_rect(rect: DyadicRectangle, x: Sequence[float]) -> int:
    """Evaluate the product Haar function :math:`h_R(x) = \\prod_t h_{R_t}(x_t)`."""
    _check_point_dim(rect, x)

    result = 1
    for side, xt in zip(rect.sides, x):
        result *= haar_eval(side, xt)
        if result == 0:
            break

    return result


def haar_moment(interval: DyadicInterval) -> float:
    """Compute :math:`\\int_0^1 x h_I(x) \\,\\mathrm{d}x` from the endpoints of *I*.

    For dyadic intervals this is :math:`|I|^2 / 4`, and the computation is
    exact in floating point for moderate levels.
    """
    a, m, b = interval.left, interval.midpoint, interval.right
    return ((b * b - m * m) - (m * m - a * a)) / 2


# }}}


# {{{ shapes


@dataclass(frozen=True, order=True)
class ShapeVector:
    """A shape :math:`\\vec r = (r_1, \\dots, r_d)` with all :math:`r_t \\ge 1`.

    The family :math:`\\mathcal{R}_{\\vec r}` contains the dyadic rectangles with
    :math:`|R_t| = 2^{-r_t}`. Zero components are rejected on purpose: the
    hyperbolic families only use shapes in :math:`\\{1, \\dots, n\\}^d`.
    """

    components: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.components:
            raise ValueError("A shape must have at least one component")

        if any(r < 1 for r in self.components):
            raise ValueError(f"Shape components must be >= 1: '{self.components}'")

    @property
    def dim(self) -> int:
        return len(self.components)

    @property
    def index(self) -> int:
        """The index :math:`|\\vec r| = r_1 + \\cdots + r_d`."""
        return sum(self.components)

    @property
    def count(self) -> int:
        """Number of rectangles :math:`2^{|\\vec r|}` in the family."""
        return 1 << self.index

    @property
    def grid_shape(self) -> tuple[int, ...]:
        """Shape of the array of rectangles, :math:`(2^{r_1}, \\dots, 2^{r_d})`."""
        return tuple(1 << r for r in self.components)

    def is_hyperbolic(self, n: int) -> bool:
        """Check membership in :math:`\\mathbb{H}^d_n`."""
        return self.index == n and all(r <= n for r in self.components)

    def __str__(self) -> str:
        return "({})".format(",".join(str(r) for r in self.components))


def enumerate_shapes(n: int, d: int) -> list[ShapeVector]:
    """Enumerate :math:`\\mathbb{H}^d_n`, the compositions of *n* into *d* parts.

    The shapes are returned in lexicographic order and there are
    :math:`\\binom{n - 1}{d - 1}` of them. If :math:`n < d` the list is empty.
    """
    if d < 1:
        raise ValueError(f"Dimension must be positive: '{d}'")

    if n < d:
        return []

    # NOTE: lexicographic order of the cut points is lexicographic order of the
    # compositions, since the first part is the first cut and so on
    shapes = []
    for cuts in itertools.combinations(range(1, n), d - 1):
        bounds = (0, *cuts, n)
        shapes.append(ShapeVector(tuple(b - a for a, b in itertools.pairwise(bounds))))

    return shapes


def rectangles_of_shape(shape: ShapeVector) -> Iterator[DyadicRectangle]:
    """Iterate over :math:`\\mathcal{R}_{\\vec r}` in row-major order."""
    for offsets in itertools.product(*(range(1 << r) for r in shape.components)):
        yield DyadicRectangle.from_offsets(shape.components, offsets)


def rectangle_index(rect: DyadicRectangle) -> int:
    """Position of *rect* in :func:`rectangles_of_shape` of its own shape."""
    return int(np.ravel_multi_index(rect.offsets, tuple(1 << k for k in rect.levels)))


# }}}


# {{{ grid functions


@dataclass(frozen=True, eq=False)
class GridFunction:
    """A piecewise-constant function on an anisotropic dyadic grid.

    The array *values* has shape :math:`(2^{m_1}, \\dots, 2^{m_d})` and holds the
    value of the function on each cell.
    """

    values: npt.NDArray[Any]

    def __post_init__(self) -> None:
        values = np.asarray(self.values)
        if values.ndim == 0:
            raise ValueError("Grid functions must have at least one dimension")

        for n in values.shape:
            if n <= 0 or n & (n - 1):
                raise ValueError(
                    f"Grid sizes must be powers of two: got shape {values.shape}"
                )

        object.__setattr__(self, "values", values)

    @property
    def dim(self) -> int:
        return self.values.ndim

    @property
    def resolution(self) -> tuple[int, ...]:
        return tuple(n.bit_length() - 1 for n in self.values.shape)

    @property
    def ncells(self) -> int:
        return int(self.values.size)

    @property
    def cell_volume(self) -> float:
        return math.ldexp(1.0, -sum(self.resolution))

    @classmethod
    def constant(cls, value: float, resolution: Sequence[int]) -> GridFunction:
        resolution = check_resolution(resolution)
        return cls(np.full(tuple(1 << m for m in resolution), value, dtype=np.float64))

    @classmethod
    def indicator(
        cls, rect: DyadicRectangle, resolution: Sequence[int] | None = None
    ) -> GridFunction:
        """Indicator of *rect* on a grid at least as fine as its levels."""
        if resolution is None:
            resolution = rect.levels

        resolution = check_resolution(resolution)
        if len(resolution) != rect.dim:
            raise DimensionMismatchError(
                f"Resolution {resolution} does not match rectangle dimension "
                f"{rect.dim}"
            )

        vectors = []
        for side, m in zip(rect.sides, resolution):
            if m < side.level:
                raise ValueError(f"Resolution {resolution} is coarser than {rect}")

            v = np.zeros(1 << m, dtype=np.float64)
            width = 1 << (m - side.level)
            v[side.offset * width : (side.offset + 1) * width] = 1.0
            vectors.append(v)

        return cls(functools.reduce(np.multiply.outer, vectors))

    @classmethod
    def from_haar(cls, rect: DyadicRectangle) -> GridFunction:
        """The Haar function :math:`h_R` at resolution :math:`(k_1 + 1, \\dots)`."""
        resolution = check_resolution([k + 1 for k in rect.levels])

        vectors = []
        for side, m in zip(rect.sides, resolution):
            v = np.zeros(1 << m, dtype=np.float64)
            v[2 * side.offset] = -1.0
            v[2 * side.offset + 1] = 1.0
            vectors.append(v)

        return cls(functools.reduce(np.multiply.outer, vectors))

    @classmethod
    def from_midpoints(
        cls,
        func: Callable[..., npt.NDArray[Any]],
        resolution: Sequence[int],
    ) -> GridFunction:
        """Sample *func* at the cell midpoints.

        :arg func: a vectorized function taking one array per coordinate.
        """
        resolution = check_resolution(resolution)
        axes = [(np.arange(1 << m) + 0.5) / (1 << m) for m in resolution]
        return cls(np.asarray(func(*np.meshgrid(*axes, indexing="ij")), dtype=float))

    def refine(self, resolution: Sequence[int]) -> GridFunction:
        """Represent the same function on a finer grid."""
        resolution = check_resolution(resolution)
        return GridFunction(refine_values(self.values, resolution))


def _block_shape(
    coarse: Sequence[int], resolution: Sequence[int]
) -> tuple[int, ...]:
    if len(coarse) != len(resolution):
        raise DimensionMismatchError(
            f"Cannot refine a {len(coarse)}-dimensional grid to {resolution}"
        )

    shape: list[int] = []
    for n, m in zip(coarse, resolution):
        fine = 1 << m
        if fine < n:
            raise ValueError(
                f"Cannot refine a grid of shape {tuple(coarse)} to the coarser "
                f"resolution {tuple(resolution)}"
            )
        shape.extend((n, fine // n))

    return tuple(shape)


def _spread(ndim: int) -> tuple[slice | None, ...]:
    return tuple(s for _ in range(ndim) for s in (slice(None), None))


def refine_values(
    values: npt.NDArray[Any], resolution: Sequence[int]
) -> npt.NDArray[Any]:
    """Repeat the cell values of *values* onto the finer grid *resolution*."""
    shape = _block_shape(values.shape, resolution)
    spread = np.broadcast_to(values[_spread(values.ndim)], shape)
    return spread.reshape(tuple(1 << m for m in resolution))


def accumulate_into(
    target: npt.NDArray[Any],
    values: npt.NDArray[Any],
    ufunc: np.ufunc = np.add,
) -> None:
    """Apply ``target = ufunc(target, refine(values))`` in place.

    The coarse *values* are broadcast onto the blocks of the (finer) *target*,
    so no refined copy is allocated.
    """
    if not target.flags.c_contiguous:
        raise ValueError("Target array must be C-contiguous")

    resolution = tuple(n.bit_length() - 1 for n in target.shape)
    view = target.reshape(_block_shape(values.shape, resolution))
    ufunc(view, values[_spread(values.ndim)], out=view)


def common_resolution(*resolutions: Sequence[int]) -> tuple[int, ...]:
    """Componentwise maximum of grid resolutions of equal dimension."""
    if not resolutions:
        raise ValueError("No resolutions given")

    dims = {len(r) for r in resolutions}
    if len(dims) != 1:
        raise DimensionMismatchError(f"Grids have different dimensions: {dims}")

    return tuple(max(ms) for ms in zip(*resolutions))


_GRID_OPERATORS: dict[str, np.ufunc] = {
    "add": np.add,
    "sub": np.subtract,
    "mul": np.multiply,
    "max": np.maximum,
    "min": np.minimum,
}


def grid_map(g: GridFunction, func: Callable[[npt.NDArray[Any]], Any]) -> GridFunction:
    """Apply the pointwise transformation *func* (e.g. :func:`numpy.sin`)."""
    return GridFunction(np.asarray(func(g.values)))


def grid_combine(
    f: GridFunction,
    g: GridFunction,
    op: str | Callable[[npt.NDArray[Any], npt.NDArray[Any]], Any] = "add",
) -> GridFunction:
    """Combine two grid functions pointwise on their common refinement.

    :arg op: one of ``"add"``, ``"sub"``, ``"mul"``, ``"max"``, ``"min"`` or a
        binary vectorized callable.
    """
    if f.dim != g.dim:
        raise DimensionMismatchError(
            f"Cannot combine grids of dimension {f.dim} and {g.dim}"
        )

    if isinstance(op, str):
        if op not in _GRID_OPERATORS:
            raise ValueError(
                f"Unknown operator '{op}'. Known operators are "
                f"'{', '.join(_GRID_OPERATORS)}'"
            )
        op = _GRID_OPERATORS[op]

    resolution = check_resolution(common_resolution(f.resolution, g.resolution))
    a = refine_values(f.values, resolution)
    b = refine_values(g.values, resolution)

    return GridFunction(np.asarray(op(a, b)))


def grid_integral(g: GridFunction) -> float:
    """Integral of *g* over the unit cube (pairwise summation of cell values)."""
    return pairwise_sum(g.values) * g.cell_volume


def grid_pnorm(g: GridFunction, p: float) -> float:
    """Compute :math:`(\\int |g|^p)^{1/p}` for :math:`0 < p \\le \\infty`.

    For :math:`p < 1` this is the usual quasi-norm. The values are scaled by
    their maximum first, so large exponents do not overflow.
    """
    if not p > 0:
        raise ValueError(f"Exponent must be positive: '{p}'")

    a = np.abs(np.asarray(g.values, dtype=np.float64))
    amax = float(np.max(a))
    if amax == 0.0 or math.isinf(p):
        return amax

    mean = pairwise_sum((a / amax) ** p) * g.cell_volume
    return amax * mean ** (1.0 / p)


def grid_inner(f: GridFunction, g: GridFunction) -> float:
    """The :math:`L^2` inner product :math:`\\langle f, g \\rangle`."""
    return grid_integral(grid_combine(f, g, "mul"))


def haar_coefficients(g: GridFunction, shape: ShapeVector) -> npt.NDArray[np.float64]:
    """Compute :math:`\\langle g, h_R \\rangle` for all
    :math:`R \\in \\mathcal{R}_{\\vec r}`.

    :returns: an array of shape :attr:`ShapeVector.grid_shape`, indexed by the
        offsets of the rectangles.
    """
    if shape.dim != g.dim:
        raise DimensionMismatchError(
            f"Shape {shape} does not match grid dimension {g.dim}"
        )

    # NOTE: if the grid is not finer than the halves of R_t, g is constant along
    # coordinate t on R_t and every coefficient vanishes
    if any(m <= r for m, r in zip(g.resolution, shape.components)):
        return np.zeros(shape.grid_shape, dtype=np.float64)

    vals = np.asarray(g.values, dtype=np.float64)
    for t, (m, r) in enumerate(zip(g.resolution, shape.components)):
        blocks = vals.reshape((*vals.shape[:t], 1 << r, 2, 1 << (m - r - 1),
                               *vals.shape[t + 1 :]))
        halves = blocks.sum(axis=t + 2)
        vals = halves.take(1, axis=t + 1) - halves.take(0, axis=t + 1)

    return vals * g.cell_volume


def rfunction_values(
    shape: ShapeVector, signs: npt.ArrayLike
) -> npt.NDArray[np.int8]:
    """Values of :math:`\\sum_R \\varepsilon_R h_R` at resolution :math:`\\vec r + 1`.

    :arg signs: the :math:`2^{|\\vec r|}` signs, in the order of
        :func:`rectangles_of_shape`.
    """
    resolution = check_resolution([r + 1 for r in shape.components])

    vals = np.asarray(signs, dtype=np.int8).reshape(shape.grid_shape)
    for t, r in enumerate(shape.components):
        vals = np.repeat(vals, 2, axis=t)
        pattern = np.tile(np.array([-1, 1], dtype=np.int8), 1 << r)
        vals = vals * pattern.reshape([-1 if s == t else 1 for s in range(shape.dim)])

    assert vals.shape == tuple(1 << m for m in resolution)
    return vals.astype(np.int8, copy=False)


# }}}
