# SPDX-FileCopyrightText: 2024 dyadic-discrepancy developers
# SPDX-License-Identifier: MIT

import math

import numpy as np
import pytest

from dyadic_discrepancy.discrepancy import (
    SignedRFunction,
    build_rfunction,
    cell_average_DN,
    classify_good,
    eval_DN,
    haar_coeff_DN,
    haar_coeff_linear,
    hyperbolic_index,
    pair_DN_grid,
    pair_DN_grid_reference,
    pair_DN_rfunction,
    rvec_floor,
    shape_coefficients_DN,
)
from dyadic_discrepancy.dyadic import (
    DimensionMismatchError,
    DyadicRectangle,
    GridFunction,
    ShapeVector,
    enumerate_shapes,
    grid_integral,
    haar_coefficients,
    rectangles_of_shape,
)
from dyadic_discrepancy.pointset import PointSet, gen_random, gen_vandercorput

# {{{ test_discrepancy_function


def test_hyperbolic_index() -> None:
    assert hyperbolic_index(1) == 1
    assert hyperbolic_index(16) == 5
    assert hyperbolic_index(17) == 6

    for npoints in range(1, 200):
        n = hyperbolic_index(npoints)
        assert 2 * npoints <= 2**n < 4 * npoints

    with pytest.raises(ValueError, match="positive"):
        hyperbolic_index(0)


def test_eval_DN() -> None:
    pointset = PointSet(np.array([[0.25, 0.25], [0.75, 0.5]]))

    assert eval_DN(pointset, (0.5, 0.5)) == 1 - 2 * 0.25
    assert eval_DN(pointset, (1.0, 1.0)) == 0.0
    # the box is open, so points on its boundary are not counted
    assert eval_DN(pointset, (0.25, 1.0)) == -2 * 0.25

    with pytest.raises(DimensionMismatchError):
        eval_DN(pointset, (0.5,))


def test_haar_coeff_by_hand() -> None:
    # D_1(x) = 1[x > 0.1] - x, so <D_1, h> = 0.1 - 1/4 on [0, 1)
    pointset = PointSet(np.array([[0.1]]))
    rect = DyadicRectangle.from_offsets((0,), (0,))

    coeff = haar_coeff_DN(pointset, rect)
    assert math.isclose(coeff.point_part, 0.1)
    assert coeff.linear_part == -0.25
    assert math.isclose(coeff.value, -0.15)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_haar_coeff_matches_pairing(d: int) -> None:
    rng = np.random.default_rng(seed=42)
    pointset = gen_random(24, d, seed=3)

    for _ in range(16):
        levels = tuple(int(r) for r in rng.integers(0, 4, size=d))
        offsets = tuple(int(rng.integers(0, 1 << r)) for r in levels)
        rect = DyadicRectangle.from_offsets(levels, offsets)

        coeff = haar_coeff_DN(pointset, rect)
        pairing = pair_DN_grid(pointset, GridFunction.from_haar(rect))
        assert math.isclose(coeff.value, pairing, rel_tol=1.0e-12, abs_tol=1.0e-13)


@pytest.mark.parametrize("shape", [(3,), (2, 1), (1, 2, 2)])
def test_shape_coefficients(shape: tuple[int, ...]) -> None:
    s = ShapeVector(shape)
    pointset = gen_random(40, s.dim, seed=7)

    coeffs = shape_coefficients_DN(pointset, s)
    assert coeffs.values.shape == s.grid_shape

    flat = coeffs.values.ravel()
    for i, rect in enumerate(rectangles_of_shape(s)):
        assert math.isclose(
            flat[i], haar_coeff_DN(pointset, rect).value, abs_tol=1.0e-15
        )


# }}}


# {{{ test_rfunctions


def test_classify_good() -> None:
    n = 6
    pointset = gen_vandercorput(n - 1)

    for shape in enumerate_shapes(n, 2):
        partition = classify_good(pointset, shape)
        assert len(partition.good) == len(partition.bad) == shape.count // 2
        assert not set(partition.good) & set(partition.bad)

        # good rectangles only see the volume term
        coeffs = shape_coefficients_DN(pointset, shape).values.ravel()
        assert np.all(coeffs[list(partition.good)] == coeffs.min())
        assert coeffs.min() < 0


def test_rfunction_zero_sign() -> None:
    # the coefficient on [0, 1/2) vanishes, which is counted as positive
    pointset = PointSet(np.array([[1.0 / 16.0]]))
    shape = ShapeVector((1,))

    f = build_rfunction(pointset, shape)
    assert f.signs.tolist() == [1, -1]
    assert pair_DN_rfunction(pointset, f) == 1.0 / 16.0

    with pytest.raises(ValueError, match="needs 2 signs"):
        SignedRFunction(shape, np.ones(3))

    with pytest.raises(ValueError, match="-1 or \\+1"):
        SignedRFunction(shape, np.array([1, 0]))


def test_rfunction_pointwise() -> None:
    shape = ShapeVector((1, 2))
    f = SignedRFunction(shape, np.array([1, -1, 1, 1, -1, 1, -1, -1]))

    assert f((0.1, 0.3)) == -1
    assert f((0.7, 0.9)) == 1
    assert f((0.0, 0.0)) == 1

    # agrees with the grid at resolution r + 1
    rng = np.random.default_rng(seed=42)
    values = f.grid().values
    for x in rng.uniform(size=(64, 2)):
        assert f(x) == values[int(4 * x[0]), int(8 * x[1])]

    with pytest.raises(DimensionMismatchError):
        f((0.5,))

    with pytest.raises(ValueError, match=r"\[0, 1\)\^d"):
        f((1.0, 0.5))


@pytest.mark.parametrize(("npoints", "d"), [(32, 2), (20, 2), (20, 3)])
def test_rfunction_pairing_floor(npoints: int, d: int) -> None:
    pointset = gen_random(npoints, d, seed=11)
    n = hyperbolic_index(npoints)

    for shape in enumerate_shapes(n, d):
        f = build_rfunction(pointset, shape)
        pairing = pair_DN_rfunction(pointset, f)

        coeffs = shape_coefficients_DN(pointset, shape).values
        assert math.isclose(pairing, np.sum(np.abs(coeffs)), rel_tol=1.0e-12)
        assert pairing >= rvec_floor(d)

        # agrees with the pairing against the grid values of the function
        grid = pair_DN_grid(pointset, f.grid())
        assert math.isclose(pairing, grid, rel_tol=1.0e-10)


def test_rfunction_beyond_index() -> None:
    rng = np.random.default_rng(seed=42)
    pointset = gen_random(16, 2, seed=1)
    n = hyperbolic_index(16)

    for index in range(n + 1, 2 * n):
        for shape in enumerate_shapes(index, 2):
            f = SignedRFunction.random(shape, rng)
            bound = pointset.npoints * 2.0**-index
            assert abs(pair_DN_rfunction(pointset, f)) <= bound


def test_haar_coeff_linear() -> None:
    rect = DyadicRectangle.from_offsets((1, 2), (0, 3))
    assert haar_coeff_linear(rect, 8, 2) == -8 * (1 / 8) ** 2 / 16

    with pytest.raises(DimensionMismatchError):
        haar_coeff_linear(rect, 8, 3)


# }}}


# {{{ test_grid_pairing


@pytest.mark.parametrize("d", [1, 2, 3])
def test_pair_DN_grid(d: int) -> None:
    rng = np.random.default_rng(seed=42)
    pointset = gen_random(30, d, seed=2)

    resolution = tuple(int(m) for m in rng.integers(1, 5, size=d))
    g = GridFunction(rng.normal(size=tuple(1 << m for m in resolution)))

    result = pair_DN_grid(pointset, g)
    expected = pair_DN_grid_reference(pointset, g)
    assert math.isclose(result, expected, rel_tol=1.0e-12, abs_tol=1.0e-13)

    with pytest.raises(DimensionMismatchError):
        pair_DN_grid(gen_random(4, d + 1), g)


@pytest.mark.parametrize("resolution", [(0,), (4,), (2, 3), (0, 0, 0), (2, 1, 3)])
def test_cell_average_DN(resolution: tuple[int, ...]) -> None:
    d = len(resolution)
    pointset = gen_random(25, d, seed=9)

    avg = cell_average_DN(pointset, resolution)
    assert avg.resolution == resolution

    expected = (
        sum(math.prod(1.0 - x for x in p) for p in pointset.points.tolist())
        - pointset.npoints * 2.0**-d
    )
    assert math.isclose(grid_integral(avg), expected, rel_tol=1.0e-12)


def test_cell_average_haar_coefficients() -> None:
    pointset = gen_random(50, 2, seed=4)
    avg = cell_average_DN(pointset, (4, 4))

    for shape in (ShapeVector((1, 2)), ShapeVector((3, 3))):
        coeffs = haar_coefficients(avg, shape)
        expected = shape_coefficients_DN(pointset, shape).values
        assert np.allclose(coeffs, expected, rtol=1.0e-12, atol=1.0e-14)


# }}}


if __name__ == "__main__":
    import sys

    if len(sys.argv) > 1:
        exec(sys.argv[1])
    else:
        pytest.main([__file__])
