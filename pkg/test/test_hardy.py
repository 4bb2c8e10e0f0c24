# SPDX-FileCopyrightText: 2024 dyadic-discrepancy developers
# SPDX-License-Identifier: MIT

import itertools
import math

import numpy as np
import pytest

from dyadic_discrepancy.discrepancy import (
    cell_average_DN,
    haar_coeff_DN,
    shape_coefficients_DN,
)
from dyadic_discrepancy.dualcert import CertificateConfig
from dyadic_discrepancy.dyadic import (
    DimensionMismatchError,
    DyadicRectangle,
    GridFunction,
    ShapeVector,
    grid_pnorm,
    haar_coefficients,
    refine_values,
)
from dyadic_discrepancy.hardy import (
    ShapeSet,
    average_values,
    chang_wilson_wolff_ratio,
    good_sets,
    hardy_lower_report,
    hardy_norm,
    int_t,
    iterated_square,
    littlewood_paley_constants,
    maximal_function,
    project_out,
    square_function,
    square_function_DN,
    tilde_DN_coeff,
    tilde_DN_grid,
)
from dyadic_discrepancy.pointset import gen_halton, gen_random, gen_vandercorput
from dyadic_discrepancy.testing import TemporaryConfiguration

# {{{ test_shape_set


def test_shape_set() -> None:
    shapes = ShapeSet.hyperbolic(5, 2)
    assert len(shapes) == 4
    assert shapes.dim == 2
    assert shapes.resolution == (4, 4)

    with pytest.raises(ValueError, match="empty"):
        ShapeSet(())

    with pytest.raises(ValueError, match="distinct"):
        ShapeSet((ShapeVector((1, 2)), ShapeVector((1, 2))))

    with pytest.raises(DimensionMismatchError):
        ShapeSet((ShapeVector((1, 2)), ShapeVector((1, 1, 1))))


# }}}


# {{{ test_projections


def test_int_t() -> None:
    rng = np.random.default_rng(seed=42)
    g = GridFunction(rng.normal(size=(4, 8)))

    avg = int_t(g, 1)
    assert avg.resolution == (0, 3)
    assert np.allclose(avg.values[0], g.values.mean(axis=0))

    rect = DyadicRectangle.from_offsets((1, 2), (1, 0))
    for t in (1, 2):
        assert np.allclose(int_t(GridFunction.from_haar(rect), t).values, 0.0)

    with pytest.raises(ValueError, match="Coordinate"):
        int_t(g, 3)


def test_project_out() -> None:
    rng = np.random.default_rng(seed=42)
    g = GridFunction(rng.normal(size=(8, 4, 4)))
    tilde = project_out(g)

    # every Int_t annihilates the projection
    for t in (1, 2, 3):
        assert np.allclose(int_t(tilde, t).values, 0.0, atol=1.0e-14)

    # and the Haar coefficients are unchanged
    for shape in (ShapeVector((1, 1, 1)), ShapeVector((2, 1, 1))):
        assert np.allclose(
            haar_coefficients(tilde, shape), haar_coefficients(g, shape),
            atol=1.0e-14,
        )

    partial = project_out(g, [2])
    assert np.allclose(int_t(partial, 2).values, 0.0, atol=1.0e-14)
    assert not np.allclose(int_t(partial, 1).values, 0.0)


def test_tilde_DN(tmp_config: TemporaryConfiguration) -> None:
    pointset = gen_random(30, 2, seed=5)
    tilde = tilde_DN_grid(pointset, (5, 5))

    for t in (1, 2):
        assert np.allclose(int_t(tilde, t).values, 0.0, atol=1.0e-13)

    for shape in (ShapeVector((1, 3)), ShapeVector((4, 1))):
        expected = shape_coefficients_DN(pointset, shape).values
        assert np.allclose(haar_coefficients(tilde, shape), expected, atol=1.0e-13)

    rect = DyadicRectangle.from_offsets((2, 1), (3, 0))
    assert tilde_DN_coeff(pointset, rect) == haar_coeff_DN(pointset, rect).value


# }}}


# {{{ test_square_functions


def test_square_function_haar() -> None:
    rect = DyadicRectangle.from_offsets((1, 2), (1, 2))
    shape = ShapeVector(rect.levels)

    sq = square_function(GridFunction.from_haar(rect), ShapeSet((shape,)))
    assert sq.resolution == (1, 2)
    assert np.allclose(sq.values, GridFunction.indicator(rect, (1, 2)).values)


def test_square_function_DN(tmp_config: TemporaryConfiguration) -> None:
    n = 6
    pointset = gen_vandercorput(n - 1)
    shapes = ShapeSet.hyperbolic(n, 2)

    closed_form = square_function_DN(pointset, shapes)
    on_grid = square_function(cell_average_DN(pointset, (n, n)), shapes)
    assert closed_form.resolution == shapes.resolution
    assert np.allclose(closed_form.values, on_grid.values, rtol=1.0e-12)

    with pytest.raises(DimensionMismatchError):
        square_function(cell_average_DN(pointset, (n, n)), ShapeSet.hyperbolic(n, 3))


def test_iterated_square(tmp_config: TemporaryConfiguration) -> None:
    pointset = gen_halton(32, 3)
    cfg = CertificateConfig(n=6)

    sq = iterated_square(pointset, cfg, 1)
    assert sq.resolution == (5, 5, 5)
    assert 0 < np.max(sq.values) <= 1.0 + 1.0e-12

    with pytest.raises(ValueError, match="order"):
        iterated_square(pointset, cfg, 2)

    assert chang_wilson_wolff_ratio(pointset, cfg) <= 10


def test_littlewood_paley(tmp_config: TemporaryConfiguration) -> None:
    pointset = gen_halton(16, 3)
    cfg = CertificateConfig(n=5)

    report = littlewood_paley_constants(pointset, cfg)
    assert sorted(report.growth) == [2, 4, 8, 16]
    assert report.constant == max(report.growth.values())
    assert 0 < report.square_sup <= 1.0 + 1.0e-12
    assert all(r > 0 for r in report.ratios.values())

    with pytest.raises(ValueError, match="d >= 3"):
        littlewood_paley_constants(gen_vandercorput(4), cfg)


# }}}


# {{{ test_maximal_function


def test_average_values() -> None:
    values = np.arange(8, dtype=np.float64).reshape(2, 4)

    assert average_values(values, (0, 0)).tolist() == [[3.5]]
    assert average_values(values, (1, 1)).tolist() == [[0.5, 2.5], [4.5, 6.5]]
    assert average_values(values, (2, 1)).shape == (4, 2)


def test_maximal_function_by_hand() -> None:
    g = GridFunction(np.array([[1.0, 0.0], [0.0, 0.0]]))
    mg = maximal_function(g, (1, 1))

    assert mg.values.tolist() == [[1.0, 0.5], [0.5, 0.25]]

    with pytest.raises(DimensionMismatchError):
        maximal_function(g, (1,))


@pytest.mark.parametrize("resolution", [(2, 2), (1, 3), (3, 0), (1, 2, 1)])
def test_maximal_function(resolution: tuple[int, ...]) -> None:
    rng = np.random.default_rng(seed=42)
    g = GridFunction(rng.normal(size=tuple(1 << m for m in resolution)))
    mg = maximal_function(g, resolution)

    # supremum over all the dyadic rectangles containing each cell
    expected = np.full(g.values.shape, -np.inf)
    for levels in itertools.product(*(range(m + 1) for m in resolution)):
        averages = refine_values(average_values(g.values, levels), resolution)
        expected = np.maximum(expected, averages)

    assert np.allclose(mg.values, expected, rtol=1.0e-13)
    assert np.all(mg.values >= g.values - 1.0e-14)

    assert math.isclose(hardy_norm(g, resolution, 0.5), grid_pnorm(mg, 0.5))


# }}}


# {{{ test_hardy_lower_bound


def test_good_sets() -> None:
    n = 6
    pointset = gen_vandercorput(n - 1)

    goods = good_sets(pointset, n)
    assert len(goods) == n - 1
    for good in goods:
        assert good.measure == 0.5
        assert good.region.resolution == good.shape.components


@pytest.mark.parametrize("p", [0.25, 0.5, 1.0])
def test_hardy_lower_report(tmp_config: TemporaryConfiguration, p: float) -> None:
    pointset = gen_vandercorput(5)
    report = hardy_lower_report(pointset, p)

    assert report.n == 6
    assert report.nshapes == 5
    assert report.good_sets_hold
    assert report.level_mass_holds
    assert report.sum_pnorm_holds
    assert report.square_holds
    assert report.growth_ratio > 0
    assert report.hardy_pnorm is None


def test_hardy_lower_report_3d(tmp_config: TemporaryConfiguration) -> None:
    pointset = gen_halton(16, 3)
    report = hardy_lower_report(pointset, 0.5, hardy_resolution=(2, 2, 2))

    assert report.n == 5
    assert report.good_sets_hold
    assert report.level_mass_holds
    assert report.sum_pnorm_holds
    assert report.square_holds
    assert report.hardy_pnorm is not None
    assert report.hardy_pnorm > 0

    data = report.to_dict()
    assert data["nshapes"] == 6


def test_hardy_lower_report_errors(tmp_config: TemporaryConfiguration) -> None:
    pointset = gen_vandercorput(5)

    with pytest.raises(ValueError, match=r"\(0, 1\]"):
        hardy_lower_report(pointset, 2.0)

    with pytest.raises(ValueError, match="2N <= 2"):
        hardy_lower_report(pointset, 0.5, n=5)

    # the smallest admissible index is 6 and the largest is 7
    hardy_lower_report(pointset, 0.5, n=7)
    with pytest.raises(ValueError, match=r"2\^n <= 4N"):
        hardy_lower_report(pointset, 0.5, n=8)


# }}}


if __name__ == "__main__":
    import sys

    if len(sys.argv) > 1:
        exec(sys.argv[1])
    else:
        pytest.main([__file__])
