# SPDX-FileCopyrightText: 2024 dyadic-discrepancy developers
# SPDX-License-Identifier: MIT

"""The discrepancy function

.. math::

    D_N(x) = \\#(\\mathcal{A}_N \\cap [0, x)) - N |[0, x)|,

its Haar coefficients in closed form, the good / bad rectangles of a shape,
the :math:`\\mathsf{r}` functions built from coefficient signs and the exact
pairings :math:`\\langle D_N, g \\rangle` with piecewise-constant functions.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from dyadic_discrepancy.dyadic import (
    DimensionMismatchError,
    DyadicRectangle,
    GridFunction,
    ShapeVector,
    check_resolution,
    haar_eval_rect,
    rectangle_index,
    rfunction_values,
)
from dyadic_discrepancy.logging import get_logger
from dyadic_discrepancy.pointset import PointSet
from dyadic_discrepancy.utils import pairwise_sum

log = get_logger(__name__)


# {{{ helpers


def hyperbolic_index(npoints: int) -> int:
    """The smallest *n* with :math:`2 N \\le 2^n`, so that :math:`2N \\le 2^n < 4N`."""
    if npoints < 1:
        raise ValueError(f"Number of points must be positive: '{npoints}'")

    return (2 * npoints - 1).bit_length()


def rvec_floor(d: int) -> float:
    """Lower bound :math:`4^{-d} / 8` on :math:`\\langle D_N, f_{\\vec r} \\rangle`."""
    return math.ldexp(1.0, -2 * d - 3)


def _check_dim(pointset: PointSet, d: int) -> None:
    if pointset.dim != d:
        raise DimensionMismatchError(
            f"Point set has dimension {pointset.dim} but expected {d}"
        )


def _cell_indices(
    points: npt.NDArray[np.float64], resolution: Sequence[int]
) -> tuple[npt.NDArray[np.int64], npt.NDArray[np.float64]]:
    """Cell multi-indices :math:`k = \\lfloor p 2^m \\rfloor` of the points and the
    offsets :math:`p - k 2^{-m}` inside their cells, both of shape ``(N, d)``.
    """
    scale = np.array([1 << m for m in resolution], dtype=np.float64)
    k = np.floor(points * scale).astype(np.int64)
    delta = points - k / scale

    return k, delta


def _point_factors(
    points: npt.NDArray[np.float64], shape: ShapeVector
) -> tuple[npt.NDArray[np.int64], npt.NDArray[np.float64]]:
    """Flat index of the rectangle of *shape* containing each point and the
    product :math:`\\prod_t \\phi(p_t, R_t)` of the one-dimensional integrals of
    :math:`h_{R_t}` over :math:`x_t > p_t`.
    """
    k, delta = _cell_indices(points, shape.components)
    h = np.array([math.ldexp(1.0, -r) for r in shape.components])

    # NOTE: phi = p - a on the left half and b - p on the right half
    phi = np.where(delta < h / 2, delta, h - delta)
    index = np.ravel_multi_index(tuple(k.T), shape.grid_shape)

    return index, np.prod(phi, axis=1)


# }}}


# {{{ discrepancy function


def eval_DN(pointset: PointSet, x: Sequence[float]) -> float:
    """Evaluate :math:`D_N(x)` for :math:`x \\in [0, 1]^d`."""
    _check_dim(pointset, len(x))

    xs = np.asarray(x, dtype=np.float64)
    count = int(np.count_nonzero(np.all(pointset.points < xs, axis=1)))

    return count - pointset.npoints * math.prod(float(xt) for xt in xs)


@dataclass(frozen=True)
class HaarCoefficient:
    """The coefficient :math:`\\langle D_N, h_R \\rangle` split into its parts."""

    rectangle: DyadicRectangle
    linear_part: float
    """Contribution :math:`-N 4^{-d} |R|^2` of the volume term."""
    point_part: float
    """Contribution of the counting term, zero for good rectangles."""

    @property
    def value(self) -> float:
        return self.point_part + self.linear_part


def haar_coeff_linear(rect: DyadicRectangle, npoints: int, d: int) -> float:
    """The linear part :math:`-N \\langle |[0, x)|, h_R \\rangle = -N 4^{-d} |R|^2`."""
    if rect.dim != d:
        raise DimensionMismatchError(
            f"Rectangle has dimension {rect.dim} but expected {d}"
        )

    return -npoints * math.ldexp(rect.volume**2, -2 * d)


def haar_coeff_point(p: Sequence[float], rect: DyadicRectangle) -> float:
    """The pairing :math:`\\langle \\mathbf{1}_{\\{x > p\\}}, h_R \\rangle`."""
    if len(p) != rect.dim:
        raise DimensionMismatchError(
            f"Point has dimension {len(p)} but rectangle has dimension {rect.dim}"
        )

    result = 1.0
    for side, pt in zip(rect.sides, p):
        if not side.contains(pt):
            return 0.0

        result *= (pt - side.left) if pt < side.midpoint else (side.right - pt)

    return result


def haar_coeff_DN(pointset: PointSet, rect: DyadicRectangle) -> HaarCoefficient:
    """The coefficient :math:`\\langle D_N, h_R \\rangle` in closed form."""
    _check_dim(pointset, rect.dim)

    point_part = pairwise_sum([haar_coeff_point(p, rect) for p in pointset.points])
    return HaarCoefficient(
        rectangle=rect,
        linear_part=haar_coeff_linear(rect, pointset.npoints, rect.dim),
        point_part=point_part,
    )


@dataclass(frozen=True, eq=False)
class ShapeCoefficients:
    """All coefficients :math:`\\langle D_N, h_R \\rangle` for
    :math:`R \\in \\mathcal{R}_{\\vec r}`.
    """

    shape: ShapeVector
    linear_part: float
    """The common linear part of all the coefficients."""
    point_part: npt.NDArray[np.float64]
    """Counting parts, an array of shape :attr:`ShapeVector.grid_shape`."""

    @property
    def values(self) -> npt.NDArray[np.float64]:
        return self.point_part + self.linear_part


def shape_coefficients_DN(pointset: PointSet, shape: ShapeVector) -> ShapeCoefficients:
    """Closed-form coefficients of :math:`D_N` for every rectangle of *shape*.

    Each point contributes to exactly one rectangle of the shape, so this costs
    :math:`O(N + 2^{|\\vec r|})`.
    """
    _check_dim(pointset, shape.dim)

    index, phi = _point_factors(pointset.points, shape)
    point_part = np.zeros(shape.count, dtype=np.float64)
    np.add.at(point_part, index, phi)

    rect = DyadicRectangle.from_offsets(shape.components, [0] * shape.dim)
    return ShapeCoefficients(
        shape=shape,
        linear_part=haar_coeff_linear(rect, pointset.npoints, shape.dim),
        point_part=point_part.reshape(shape.grid_shape),
    )


# }}}


# {{{ good rectangles and r functions


@dataclass(frozen=True)
class GoodBadPartition:
    """Splits :math:`\\mathcal{R}_{\\vec r}` into rectangles without points of
    :math:`\\mathcal{A}_N` (good) and with at least one point (bad).

    Rectangles are referred to by their position in
    :func:`~dyadic_discrepancy.dyadic.rectangles_of_shape`.
    """

    shape: ShapeVector
    good: tuple[int, ...]
    bad: tuple[int, ...]


def classify_good(pointset: PointSet, shape: ShapeVector) -> GoodBadPartition:
    _check_dim(pointset, shape.dim)

    k, _ = _cell_indices(pointset.points, shape.components)
    occupied = np.zeros(shape.count, dtype=np.bool_)
    occupied[np.ravel_multi_index(tuple(k.T), shape.grid_shape)] = True

    return GoodBadPartition(
        shape=shape,
        good=tuple(int(i) for i in np.flatnonzero(~occupied)),
        bad=tuple(int(i) for i in np.flatnonzero(occupied)),
    )


@dataclass(frozen=True, eq=False)
class SignedRFunction:
    """The :math:`\\mathsf{r}` function
    :math:`f_{\\vec r} = \\sum_{R \\in \\mathcal{R}_{\\vec r}} \\varepsilon_R h_R`.
    """

    shape: ShapeVector
    signs: npt.NDArray[np.int8]
    """Signs :math:`\\varepsilon_R \\in \\{-1, +1\\}` in the order of
    :func:`~dyadic_discrepancy.dyadic.rectangles_of_shape`."""

    def __post_init__(self) -> None:
        signs = np.asarray(self.signs, dtype=np.int8).ravel()
        if signs.size != self.shape.count:
            raise ValueError(
                f"Shape {self.shape} needs {self.shape.count} signs: got {signs.size}"
            )

        if not np.all(np.abs(signs) == 1):
            raise ValueError("Signs must be -1 or +1")

        object.__setattr__(self, "signs", signs)

    @classmethod
    def constant(cls, shape: ShapeVector, sign: int = 1) -> SignedRFunction:
        return cls(shape, np.full(shape.count, sign, dtype=np.int8))

    @classmethod
    def random(cls, shape: ShapeVector, rng: np.random.Generator) -> SignedRFunction:
        signs = 2 * rng.integers(0, 2, size=shape.count, dtype=np.int8) - 1
        return cls(shape, signs.astype(np.int8))

    def sign(self, rect: DyadicRectangle) -> int:
        if rect.levels != self.shape.components:
            raise ValueError(f"Rectangle {rect} is not of shape {self.shape}")

        return int(self.signs[rectangle_index(rect)])

    def __call__(self, x: Sequence[float]) -> int:
        """Evaluate the function at a single point *x* in :math:`[0, 1)^d`."""
        if len(x) != self.shape.dim:
            raise DimensionMismatchError(
                f"Point has dimension {len(x)} but shape {self.shape} has "
                f"dimension {self.shape.dim}"
            )

        if not all(0.0 <= xt < 1.0 for xt in x):
            raise ValueError(f"Point must be in [0, 1)^d: '{tuple(x)}'")

        # only the rectangle of this shape containing x contributes
        rect = DyadicRectangle.from_offsets(
            self.shape.components,
            [int(math.ldexp(xt, r)) for xt, r in zip(x, self.shape.components)],
        )
        return self.sign(rect) * haar_eval_rect(rect, x)

    def grid(self) -> GridFunction:
        """The function as a grid of values at resolution :math:`\\vec r + 1`."""
        return GridFunction(rfunction_values(self.shape, self.signs))


def build_rfunction(pointset: PointSet, shape: ShapeVector) -> SignedRFunction:
    """Signs :math:`\\operatorname{sgn} \\langle D_N, h_R \\rangle` with
    :math:`\\operatorname{sgn}(0) = +1`.
    """
    coeffs = shape_coefficients_DN(pointset, shape)
    signs = np.where(coeffs.values.ravel() >= 0.0, 1, -1).astype(np.int8)

    return SignedRFunction(shape, signs)


def pair_DN_rfunction(pointset: PointSet, f: SignedRFunction) -> float:
    """Compute :math:`\\sum_R \\varepsilon_R \\langle D_N, h_R \\rangle` in
    closed form.
    """
    _check_dim(pointset, f.shape.dim)

    rect = DyadicRectangle.from_offsets(f.shape.components, [0] * f.shape.dim)
    linear = haar_coeff_linear(rect, pointset.npoints, f.shape.dim)

    index, phi = _point_factors(pointset.points, f.shape)
    point_part = pairwise_sum(f.signs[index] * phi)

    return linear * int(np.sum(f.signs, dtype=np.int64)) + point_part


# }}}


# {{{ pairing with grid functions


def _subsets(d: int) -> list[tuple[int, ...]]:
    return [
        subset
        for size in range(d + 1)
        for subset in itertools.combinations(range(d), size)
    ]


def _suffix_cumsum(
    values: npt.NDArray[np.float64], axes: Sequence[int]
) -> npt.NDArray[np.float64]:
    for axis in axes:
        values = np.flip(np.cumsum(np.flip(values, axis=axis), axis=axis), axis=axis)

    return values


def _prefix_cumsum(
    values: npt.NDArray[np.float64], axes: Sequence[int]
) -> npt.NDArray[np.float64]:
    for axis in axes:
        values = np.cumsum(values, axis=axis)

    return values


def _linear_moment(g: GridFunction) -> float:
    """Compute :math:`L_g = \\int g(x) \\prod_t x_t \\,\\mathrm{d}x` cell by cell."""
    values = np.asarray(g.values, dtype=np.float64)
    for m in g.resolution:
        j = np.arange(1 << m, dtype=np.float64)
        mu = (2 * j + 1) * math.ldexp(1.0, -2 * m - 1)
        values = np.tensordot(values, mu, axes=([0], [0]))

    return float(values)


def pair_DN_grid(pointset: PointSet, g: GridFunction) -> float:
    """Compute :math:`\\langle D_N, g \\rangle` exactly for a grid function *g*.

    The pairing is :math:`\\sum_p I_g(p) - N L_g`, where
    :math:`I_g(p) = \\int_{x > p} g`. In each coordinate the weight of a cell
    is :math:`h \\mathbf{1}[j \\ge k_t] - \\delta_t e_{k_t}`, with :math:`k_t` the
    cell containing :math:`p_t` and :math:`\\delta_t` the offset of :math:`p_t`
    inside it. Expanding the product over coordinates gives :math:`2^d` terms,
    each of which is a suffix-sum table of the cell values (summed along the
    coordinates not in the term) evaluated at :math:`k`. Tables are built one at
    a time, so the extra memory is that of a single grid.
    """
    _check_dim(pointset, g.dim)
    resolution = check_resolution(g.resolution)

    k, delta = _cell_indices(pointset.points, resolution)
    h = np.array([math.ldexp(1.0, -m) for m in resolution])
    values = np.asarray(g.values, dtype=np.float64)

    index = tuple(k.T)
    counting = np.zeros(pointset.npoints, dtype=np.float64)
    for subset in _subsets(g.dim):
        rest = [t for t in range(g.dim) if t not in subset]
        table = _suffix_cumsum(values, rest)

        weight = np.prod(-delta[:, list(subset)], axis=1) * np.prod(h[rest])
        counting += weight * table[index]

    return pairwise_sum(counting) - pointset.npoints * _linear_moment(g)


def pair_DN_grid_reference(pointset: PointSet, g: GridFunction) -> float:
    """Compute :math:`\\langle D_N, g \\rangle` by a full contraction per point.

    This costs :math:`O(N \\times \\text{cells})` and is only meant as a check on
    :func:`pair_DN_grid`.
    """
    _check_dim(pointset, g.dim)
    resolution = check_resolution(g.resolution)

    values = np.asarray(g.values, dtype=np.float64)
    counting = []
    for p in pointset.points:
        partial = values
        for pt, m in zip(p, resolution):
            h = math.ldexp(1.0, -m)
            left = np.arange(1 << m) * h
            w = np.clip(left + h - pt, 0.0, h)
            partial = np.tensordot(partial, w, axes=([0], [0]))
        counting.append(float(partial))

    return pairwise_sum(counting) - pointset.npoints * _linear_moment(g)


def cell_average_DN(pointset: PointSet, resolution: Sequence[int]) -> GridFunction:
    """The average of :math:`D_N` over each cell of a grid.

    The volume term averages to the product of the cell midpoints. In each
    coordinate the average of :math:`\\mathbf{1}[x_t > p_t]` over cell
    :math:`j` is :math:`\\beta_t e_{k_t} + \\mathbf{1}[j \\ge k_t + 1]`, with
    :math:`\\beta_t = (b - p_t) / h` the fraction of the cell of :math:`p_t` to
    its right, and the counting term is assembled from the :math:`2^d` terms of
    the product as weighted histograms followed by prefix sums.
    """
    _check_dim(pointset, len(resolution))
    resolution = check_resolution(resolution)
    grid_shape = tuple(1 << m for m in resolution)
    d = len(resolution)

    k, delta = _cell_indices(pointset.points, resolution)
    h = np.array([math.ldexp(1.0, -m) for m in resolution])
    beta = (h - delta) / h

    counts = np.zeros(grid_shape, dtype=np.float64)
    for subset in _subsets(d):
        rest = [t for t in range(d) if t not in subset]

        index = k.copy()
        index[:, rest] += 1
        mask = np.all(index < np.array(grid_shape), axis=1)

        hist = np.zeros(grid_shape, dtype=np.float64)
        np.add.at(
            hist,
            tuple(index[mask].T),
            np.prod(beta[mask][:, list(subset)], axis=1),
        )
        counts += _prefix_cumsum(hist, rest)

    midpoints = [(np.arange(n) + 0.5) / n for n in grid_shape]
    volume = midpoints[0]
    for mid in midpoints[1:]:
        volume = np.multiply.outer(volume, mid)

    return GridFunction(counts - pointset.npoints * volume)


# }}}
