# SPDX-FileCopyrightText: 2024 dyadic-discrepancy developers
# SPDX-License-Identifier: MIT

import pathlib

import numpy as np
import pytest

from dyadic_discrepancy.dyadic import enumerate_shapes
from dyadic_discrepancy.pointset import (
    PointSet,
    PointSetParseError,
    UnsupportedDimensionError,
    bit_reverse,
    format_points,
    gen_halton,
    gen_random,
    gen_vandercorput,
    generate,
    load_points,
    save_points,
)

# {{{ test_generators


def test_point_set_validation() -> None:
    with pytest.raises(ValueError, match="at least one point"):
        PointSet(np.empty((0, 2)))

    with pytest.raises(ValueError, match=r"\[0, 1\)"):
        PointSet(np.array([[0.5, 1.0]]))

    with pytest.raises(ValueError, match="shape"):
        PointSet(np.array([0.5, 0.5]))


def test_bit_reverse() -> None:
    i = np.arange(8, dtype=np.int64)
    assert bit_reverse(i, 3).tolist() == [0, 4, 2, 6, 1, 5, 3, 7]


@pytest.mark.parametrize("m", [0, 3, 6])
def test_vandercorput(m: int) -> None:
    pointset = gen_vandercorput(m)
    assert pointset.npoints == 1 << m
    assert pointset.dim == 2

    # every dyadic rectangle of volume 2^-m contains exactly one point
    for k in range(m + 1):
        cells = np.floor(pointset.points * [1 << k, 1 << (m - k)]).astype(np.int64)
        flat = cells[:, 0] * (1 << (m - k)) + cells[:, 1]
        assert np.array_equal(np.sort(flat), np.arange(1 << m))


def test_random_is_reproducible() -> None:
    a = gen_random(100, 3, seed=1)
    b = gen_random(100, 3, seed=1)
    c = gen_random(100, 3, seed=2)

    assert a == b
    assert a != c
    assert a.meta["seed"] == 1


def test_halton() -> None:
    pointset = gen_halton(8, 3)
    assert pointset.npoints == 8

    # radical inverses of 1, 2, ... in base 2
    assert np.allclose(pointset.points[:4, 0], [0.5, 0.25, 0.75, 0.125])

    with pytest.raises(UnsupportedDimensionError):
        gen_halton(8, 9)


def test_generate() -> None:
    assert generate("vdc", 16, 2) == gen_vandercorput(4)

    with pytest.raises(UnsupportedDimensionError):
        generate("vdc", 16, 3)

    with pytest.raises(ValueError, match="power of two"):
        generate("vdc", 12, 2)

    with pytest.raises(ValueError, match="Unknown point family"):
        generate("sobol", 16, 2)


def test_vandercorput_shapes_are_half_full() -> None:
    # with N = 2^(n - 1) points, half of the rectangles of each shape are empty
    n = 6
    pointset = gen_vandercorput(n - 1)
    for shape in enumerate_shapes(n, 2):
        cells = np.floor(pointset.points * list(shape.grid_shape)).astype(np.int64)
        occupied = {tuple(c) for c in cells.tolist()}
        assert len(occupied) == pointset.npoints == shape.count // 2


# }}}


# {{{ test_io


def test_save_load(tmp_path: pathlib.Path) -> None:
    pointset = gen_random(17, 3, seed=5)
    filename = tmp_path / "points.txt"

    save_points(pointset, filename)
    assert filename.read_text(encoding="utf-8") == format_points(pointset)

    result = load_points(filename)
    assert result == pointset


def test_load_blank_lines(tmp_path: pathlib.Path) -> None:
    filename = tmp_path / "points.txt"
    filename.write_text("2 2\n\n0.5 0.25\n\n0.0 0.75\n", encoding="utf-8")

    pointset = load_points(filename)
    assert pointset.points.tolist() == [[0.5, 0.25], [0.0, 0.75]]


@pytest.mark.parametrize(
    ("contents", "lineno", "match"),
    [
        ("", 1, "header"),
        ("2 x\n0.1 0.2\n", 1, "malformed header"),
        ("2 2\n0.1 0.2\n", 2, "expected 2 points"),
        ("2 1\n0.1\n", 2, "expected 2 coordinates"),
        ("2 1\n0.1 abc\n", 2, "invalid coordinate"),
        ("2 2\n0.1 0.2\n\n0.3 1.0\n", 4, "not in"),
    ],
)
def test_load_errors(
    tmp_path: pathlib.Path, contents: str, lineno: int, match: str
) -> None:
    filename = tmp_path / "points.txt"
    filename.write_text(contents, encoding="utf-8")

    with pytest.raises(PointSetParseError, match=match) as exc:
        load_points(filename)

    assert exc.value.lineno == lineno
    assert str(exc.value).startswith(f"{filename}:{lineno}:")


# }}}


if __name__ == "__main__":
    import sys

    if len(sys.argv) > 1:
        exec(sys.argv[1])
    else:
        pytest.main([__file__])
