# SPDX-FileCopyrightText: 2024 dyadic-discrepancy developers
# SPDX-License-Identifier: MIT

"""Square functions, the dyadic maximal function and the Hardy space lower
bound for the discrepancy function.

The projection :math:`\\widetilde{D}_N = \\prod_t (\\mathrm{Id} - \\mathrm{Int}_t) D_N`
removes every component of :math:`D_N` that is constant in some coordinate.
Each :math:`\\mathrm{Int}_t` annihilates :math:`h_{R_t}`, so the projection keeps
all the Haar coefficients of :math:`D_N`, while every :math:`\\mathrm{Int}_t`
annihilates the result.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterable, Sequence
from dataclasses import asdict, dataclass
from typing import Any

import numpy as np
import numpy.typing as npt

from dyadic_discrepancy.discrepancy import (
    cell_average_DN,
    classify_good,
    haar_coeff_DN,
    hyperbolic_index,
    shape_coefficients_DN,
)
from dyadic_discrepancy.dualcert import (
    CertificateConfig,
    build_Fs,
    build_Phi,
    phi_resolution,
    prefix_vectors,
)
from dyadic_discrepancy.dyadic import (
    DimensionMismatchError,
    DyadicRectangle,
    GridFunction,
    ShapeVector,
    accumulate_into,
    check_resolution,
    enumerate_shapes,
    grid_integral,
    grid_pnorm,
    haar_coefficients,
    refine_values,
)
from dyadic_discrepancy.logging import get_logger
from dyadic_discrepancy.pointset import PointSet
from dyadic_discrepancy.utils import timeit

log = get_logger(__name__)


# {{{ shape sets


@dataclass(frozen=True)
class ShapeSet:
    """A finite set of shapes selecting the Haar scales of a square function."""

    shapes: tuple[ShapeVector, ...]

    def __post_init__(self) -> None:
        if not self.shapes:
            raise ValueError("A shape set must not be empty")

        if len(set(self.shapes)) != len(self.shapes):
            raise ValueError("Shapes in a shape set must be distinct")

        dims = {shape.dim for shape in self.shapes}
        if len(dims) != 1:
            raise DimensionMismatchError(f"Shapes have different dimensions: {dims}")

    @classmethod
    def hyperbolic(cls, n: int, d: int) -> ShapeSet:
        return cls(tuple(enumerate_shapes(n, d)))

    @property
    def dim(self) -> int:
        return self.shapes[0].dim

    @property
    def resolution(self) -> tuple[int, ...]:
        """Coarsest resolution on which all the rectangles are unions of cells."""
        return tuple(max(ms) for ms in zip(*(s.components for s in self.shapes)))

    def __len__(self) -> int:
        return len(self.shapes)


# }}}


# {{{ integration operators


def _check_axis(g: GridFunction, t: int) -> int:
    if not 1 <= t <= g.dim:
        raise ValueError(f"Coordinate must be in [1, {g.dim}]: '{t}'")

    return t - 1


def int_t(g: GridFunction, t: int) -> GridFunction:
    """Average out coordinate *t* (1-based); the result has level 0 in *t*."""
    axis = _check_axis(g, t)
    return GridFunction(np.mean(g.values, axis=axis, keepdims=True, dtype=np.float64))


def project_out(
    g: GridFunction, coordinates: Iterable[int] | None = None
) -> GridFunction:
    """Apply :math:`\\prod_t (\\mathrm{Id} - \\mathrm{Int}_t)` over *coordinates*
    (all of them by default).
    """
    if coordinates is None:
        coordinates = range(1, g.dim + 1)

    values = np.array(g.values, dtype=np.float64)
    for t in coordinates:
        axis = _check_axis(g, t)
        values -= values.mean(axis=axis, keepdims=True)

    return GridFunction(values)


def tilde_DN_coeff(pointset: PointSet, rect: DyadicRectangle) -> float:
    """The coefficient :math:`\\langle \\widetilde{D}_N, h_R \\rangle`, which is
    :math:`\\langle D_N, h_R \\rangle` for every dyadic rectangle.
    """
    return haar_coeff_DN(pointset, rect).value


def tilde_DN_grid(pointset: PointSet, resolution: Sequence[int]) -> GridFunction:
    """The projection :math:`\\widetilde{D}_N` of the cell averages of :math:`D_N`."""
    return project_out(cell_average_DN(pointset, resolution))


# }}}


# {{{ square functions


def _square_sum(
    coefficients: Iterable[tuple[ShapeVector, npt.NDArray[np.float64]]],
    resolution: Sequence[int],
) -> GridFunction:
    resolution = check_resolution(resolution)
    total = np.zeros(tuple(1 << m for m in resolution), dtype=np.float64)
    for shape, coeffs in coefficients:
        volume = math.ldexp(1.0, -shape.index)
        accumulate_into(total, (coeffs / volume) ** 2)

    return GridFunction(total)


def square_function(g: GridFunction, shapes: ShapeSet) -> GridFunction:
    """The truncated square function

    .. math::

        S(g) = \\left(\\sum_{R} \\frac{|\\langle g, h_R \\rangle|^2}{|R|^2}
            \\mathbf{1}_R\\right)^{1/2},

    summed over the rectangles of the given *shapes*.
    """
    if shapes.dim != g.dim:
        raise DimensionMismatchError(
            f"Shapes of dimension {shapes.dim} for a grid of dimension {g.dim}"
        )

    squares = _square_sum(
        ((shape, haar_coefficients(g, shape)) for shape in shapes.shapes),
        shapes.resolution,
    )
    return GridFunction(np.sqrt(squares.values))


def square_function_DN(pointset: PointSet, shapes: ShapeSet) -> GridFunction:
    """Square function of :math:`\\widetilde{D}_N` from the closed-form coefficients."""
    squares = _square_sum(
        (
            (shape, shape_coefficients_DN(pointset, shape).values)
            for shape in shapes.shapes
        ),
        shapes.resolution,
    )
    return GridFunction(np.sqrt(squares.values))


def iterated_square(
    pointset: PointSet, cfg: CertificateConfig, k: int
) -> GridFunction:
    """The iterated square function :math:`S_k(\\Phi)`.

    The terms :math:`\\sin(\\epsilon n^{-1/2} F_{\\vec s})` of :math:`\\Phi` are
    grouped by the first *k* coordinates of :math:`\\vec s`, and

    .. math::

        S_k(\\Phi) = n^{-(d - 2)/2} \\left(\\sum_{\\sigma} \\left|
            \\sum_{\\vec s_{1:k} = \\sigma}
            \\sin(\\epsilon n^{-1/2} F_{\\vec s})\\right|^2\\right)^{1/2}.
    """
    d = pointset.dim
    if not 1 <= k <= d - 2:
        raise ValueError(f"Square function order must be in [1, {d - 2}]: '{k}'")

    resolution = check_resolution(phi_resolution(cfg.n, d, cfg.s_cap))
    grid_shape = tuple(1 << m for m in resolution)

    classes: dict[tuple[int, ...], list[tuple[int, ...]]] = {}
    for prefix in prefix_vectors(cfg.n, d, cfg.s_cap):
        classes.setdefault(prefix[:k], []).append(prefix)

    with timeit(f"Square function S_{k} for n = {cfg.n}"):
        total = np.zeros(grid_shape, dtype=np.float64)
        for members in classes.values():
            partial = np.zeros(grid_shape, dtype=np.float64)
            for prefix in members:
                fs = build_Fs(pointset, prefix, cfg)
                accumulate_into(partial, np.sin(cfg.scale * fs.values))
            total += partial**2

    return GridFunction(cfg.n ** (-(d - 2) / 2) * np.sqrt(total))


@dataclass(frozen=True)
class LittlewoodPaleyReport:
    ratios: dict[float, float]
    """:math:`\\|\\Phi\\|_p / (p^{(d - 2)/2} \\|S_{d - 2} \\Phi\\|_p)` for each *p*."""
    growth: dict[float, float]
    """:math:`\\|\\Phi\\|_p / p^{(d - 2)/2}` for each *p*."""
    constant: float
    """The largest of :attr:`growth`, a single constant valid for all *p*."""
    square_sup: float
    """:math:`\\|S_{d - 2} \\Phi\\|_\\infty`, at most 1."""


def littlewood_paley_constants(
    pointset: PointSet,
    cfg: CertificateConfig,
    ps: Sequence[float] = (2, 4, 8, 16),
) -> LittlewoodPaleyReport:
    d = pointset.dim
    if d < 3:
        raise ValueError(f"Iterated square functions need d >= 3: got '{d}'")

    phi = build_Phi(pointset, cfg)
    sq = iterated_square(pointset, cfg, d - 2)

    ratios = {}
    growth = {}
    for p in ps:
        phi_p = grid_pnorm(phi, p)
        sq_p = grid_pnorm(sq, p)
        growth[p] = phi_p / p ** ((d - 2) / 2)
        ratios[p] = growth[p] / sq_p if sq_p > 0 else math.inf

    return LittlewoodPaleyReport(
        ratios=ratios,
        growth=growth,
        constant=max(growth.values()),
        square_sup=float(np.max(sq.values)),
    )


def chang_wilson_wolff_ratio(pointset: PointSet, cfg: CertificateConfig) -> float:
    """Ratio of :math:`\\|\\Phi\\|_{\\exp(L^2)}` (through its *p*-norms) to
    :math:`\\|S_1(\\Phi)\\|_\\infty`.
    """
    from dyadic_discrepancy.norms import exp_orlicz_via_pnorms

    phi = build_Phi(pointset, cfg)
    sq = iterated_square(pointset, cfg, 1)
    sup = float(np.max(sq.values))

    return exp_orlicz_via_pnorms(phi, 2.0) / sup if sup > 0 else math.inf


# }}}


# {{{ maximal function


def average_values(
    values: npt.NDArray[Any], resolution: Sequence[int]
) -> npt.NDArray[np.float64]:
    """Represent *values* at *resolution*, averaging over blocks along the
    coordinates where it is coarser and repeating where it is finer.
    """
    result = np.asarray(values, dtype=np.float64)
    for t, m in enumerate(resolution):
        n = result.shape[t]
        target = 1 << m
        if target < n:
            shape = (*result.shape[:t], target, n // target, *result.shape[t + 1 :])
            result = result.reshape(shape).mean(axis=t + 1)
        elif target > n:
            result = np.repeat(result, target // n, axis=t)

    return result


def maximal_function(g: GridFunction, resolution: Sequence[int]) -> GridFunction:
    """The dyadic maximal function (without absolute values)

    .. math::

        M g(x) = \\sup_{R \\ni x} \\frac{1}{|R|} \\int_R g,

    over all dyadic rectangles with side levels :math:`0 \\le \\ell_t \\le m_t`.

    The supremum is computed on the lattice of levels: with :math:`A_\\ell` the
    averages at levels :math:`\\ell`,
    :math:`B_\\ell = \\max(A_\\ell, B_{\\ell - e_t})` over the coordinates with
    :math:`\\ell_t > 0`, and :math:`M g = B_m`.
    """
    if len(resolution) != g.dim:
        raise DimensionMismatchError(
            f"Resolution {tuple(resolution)} for a grid of dimension {g.dim}"
        )

    resolution = check_resolution(resolution)
    finest = check_resolution(
        [max(m, mg) for m, mg in zip(resolution, g.resolution)]
    )
    fine = refine_values(g.values, finest) if finest != g.resolution else g.values

    best: dict[tuple[int, ...], npt.NDArray[np.float64]] = {}
    for levels in itertools.product(*(range(m + 1) for m in resolution)):
        current = average_values(fine, levels)
        for t, level in enumerate(levels):
            if level == 0:
                continue

            parent = (*levels[:t], level - 1, *levels[t + 1 :])
            current = np.maximum(current, np.repeat(best[parent], 2, axis=t))

        best[levels] = current

    return GridFunction(best[resolution])


def hardy_norm(g: GridFunction, resolution: Sequence[int], p: float) -> float:
    """The quasi-norm :math:`\\|M g\\|_p` of the dyadic Hardy space."""
    return grid_pnorm(maximal_function(g, resolution), p)


# }}}


# {{{ good sets


@dataclass(frozen=True, eq=False)
class GoodSet:
    """The union :math:`G_{\\vec r}` of the good rectangles of one shape."""

    shape: ShapeVector
    region: GridFunction
    """Indicator of the set, at resolution :math:`\\vec r`."""
    measure: float


def good_sets(pointset: PointSet, n: int) -> list[GoodSet]:
    """Good sets :math:`G_{\\vec r}` for all :math:`\\vec r \\in \\mathbb{H}^d_n`."""
    result = []
    for shape in enumerate_shapes(n, pointset.dim):
        partition = classify_good(pointset, shape)

        indicator = np.zeros(shape.count, dtype=np.float64)
        indicator[list(partition.good)] = 1.0
        region = GridFunction(indicator.reshape(shape.grid_shape))

        result.append(
            GoodSet(shape=shape, region=region, measure=grid_integral(region))
        )

    return result


@dataclass(frozen=True)
class HardyReport:
    d: int
    n: int
    npoints: int
    p: float
    nshapes: int
    """The number :math:`J = |\\mathbb{H}^d_n|` of shapes."""
    min_good_measure: float
    level_mass: float
    """Measure of :math:`\\{\\sum_{\\vec r} \\mathbf{1}_{G_{\\vec r}} > J/4\\}`."""
    sum_pnorm: float
    sum_pnorm_floor: float
    square_pnorm: float
    """:math:`\\|S(\\widetilde{D}_N)\\|_p` over the shapes of
    :math:`\\mathbb{H}^d_n`."""
    square_floor: float
    growth_ratio: float
    """:math:`\\|S(\\widetilde{D}_N)\\|_p / n^{(d - 1)/2}`."""
    hardy_pnorm: float | None = None
    """:math:`\\|M \\widetilde{D}_N\\|_p`, when a resolution is given."""

    @property
    def good_sets_hold(self) -> bool:
        return self.min_good_measure >= 0.5

    @property
    def level_mass_holds(self) -> bool:
        return self.level_mass >= 0.25

    @property
    def sum_pnorm_holds(self) -> bool:
        return self.sum_pnorm >= self.sum_pnorm_floor

    @property
    def square_holds(self) -> bool:
        return self.square_pnorm >= self.square_floor

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def hardy_lower_report(
    pointset: PointSet,
    p: float,
    *,
    n: int | None = None,
    hardy_resolution: Sequence[int] | None = None,
) -> HardyReport:
    """Run the square function lower bound for :math:`\\|\\widetilde{D}_N\\|_{H^p}`.

    :arg n: index of the hyperbolic family, which must satisfy
        :math:`2N \\le 2^n \\le 4N`. By default the smallest such *n*.
    :arg hardy_resolution: if given, also compute the maximal function of
        :math:`\\widetilde{D}_N` at this resolution.
    """
    if not 0 < p <= 1:
        raise ValueError(f"Exponent must be in (0, 1]: '{p}'")

    if n is None:
        n = hyperbolic_index(pointset.npoints)

    if 2 * pointset.npoints > 1 << n:
        raise ValueError(f"Need 2N <= 2^n: got N = {pointset.npoints} and n = {n}")

    # the level set mass of the sum of indicators needs N 2^-n >= 1/4
    if 1 << n > 4 * pointset.npoints:
        raise ValueError(f"Need 2^n <= 4N: got N = {pointset.npoints} and n = {n}")

    d = pointset.dim
    shapes = ShapeSet.hyperbolic(n, d)
    nshapes = len(shapes)

    with timeit(f"Good sets for n = {n}"):
        goods = good_sets(pointset, n)
        resolution = check_resolution(shapes.resolution)
        counts = np.zeros(tuple(1 << m for m in resolution), dtype=np.float64)
        for good in goods:
            accumulate_into(counts, good.region.values)
        counts_grid = GridFunction(counts)

    level_mass = float(np.count_nonzero(counts > nshapes / 4)) / counts.size
    sum_pnorm = grid_pnorm(counts_grid, p)

    with timeit(f"Square function for n = {n}"):
        square = square_function_DN(pointset, shapes)
    square_pnorm = grid_pnorm(square, p)

    floor = math.sqrt(math.ldexp(1.0, -4 * d - 4))
    hardy_pnorm = None
    if hardy_resolution is not None:
        hardy_pnorm = hardy_norm(
            tilde_DN_grid(pointset, hardy_resolution), hardy_resolution, p
        )

    return HardyReport(
        d=d,
        n=n,
        npoints=pointset.npoints,
        p=p,
        nshapes=nshapes,
        min_good_measure=min(good.measure for good in goods),
        level_mass=level_mass,
        sum_pnorm=sum_pnorm,
        sum_pnorm_floor=(nshapes / 4) * 0.25 ** (1 / p),
        square_pnorm=square_pnorm,
        square_floor=floor * math.sqrt(nshapes / 4) * 0.25 ** (1 / p),
        growth_ratio=square_pnorm / n ** ((d - 1) / 2),
        hardy_pnorm=hardy_pnorm,
    )


# }}}
