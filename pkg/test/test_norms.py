# SPDX-FileCopyrightText: 2024 dyadic-discrepancy developers
# SPDX-License-Identifier: MIT

import math

import numpy as np
import pytest

from dyadic_discrepancy.discrepancy import cell_average_DN
from dyadic_discrepancy.dyadic import GridFunction, grid_pnorm
from dyadic_discrepancy.norms import (
    OrliczGauge,
    dn_norm_suite,
    dual_pairing_check,
    empirical_pnorms,
    exp_orlicz_via_pnorms,
    luxemburg_norm,
    orlicz_norm,
    pnorm_report,
    rademacher_checks,
    rademacher_sums,
)
from dyadic_discrepancy.pointset import gen_random, gen_vandercorput
from dyadic_discrepancy.testing import TemporaryConfiguration

# {{{ test_gauges


def test_gauge_validation() -> None:
    assert OrliczGauge("exp", 2.0).name == "exp(L^2)"
    assert OrliczGauge("llog", 0.5).name == "L(log L)^0.5"

    with pytest.raises(ValueError, match="positive"):
        OrliczGauge("exp", 0.0)

    with pytest.raises(ValueError, match="non-negative"):
        OrliczGauge("llog", -1.0)

    with pytest.raises(ValueError, match="Unknown gauge kind"):
        OrliczGauge("sin", 1.0)  # type: ignore[arg-type]


@pytest.mark.parametrize("alpha", [0.25, 0.5, 2.0 / 3.0])
def test_gauge_splice(alpha: float) -> None:
    gauge = OrliczGauge("exp", alpha)
    t1 = gauge.splice
    assert t1 > 0

    # the linear part is tangent to exp(t^alpha) - 1 at t1
    slope = math.expm1(t1**alpha) / t1
    assert math.isclose(slope, alpha * t1 ** (alpha - 1) * math.exp(t1**alpha),
                        rel_tol=1.0e-9)

    x = np.array([0.0, t1 / 2, t1, 2 * t1])
    psi = gauge(x)
    assert psi[0] == 0.0
    assert math.isclose(psi[1], slope * t1 / 2)
    assert math.isclose(psi[2], math.expm1(t1**alpha))
    assert math.isclose(psi[3], math.expm1((2 * t1) ** alpha))

    # convex: the secant slopes increase
    t = np.linspace(0.0, 4 * t1, 257)
    psi = gauge(t)
    assert np.all(np.diff(psi, n=2) >= -1.0e-10 * np.max(psi))

    assert OrliczGauge("exp", 1.0).splice == 0.0
    assert OrliczGauge("llog", 0.5).splice == 0.0


# }}}


# {{{ test_luxemburg


def test_constant_norms() -> None:
    g = GridFunction.constant(1.0, (2, 3))

    report = orlicz_norm(g, OrliczGauge("exp", 2.0))
    assert math.isclose(report.value, 1.0 / math.sqrt(math.log(2)), rel_tol=1.0e-10)
    assert report.method == "bisection"
    assert report.residual is not None
    assert abs(report.residual) < 1.0e-9
    assert report.meta["resolution"] == (2, 3)

    # L (log L)^0 is L^1
    report = orlicz_norm(g, OrliczGauge("llog", 0.0))
    assert math.isclose(report.value, 1.0, rel_tol=1.0e-10)

    report = orlicz_norm(GridFunction.constant(0.0, (1,)), OrliczGauge("exp", 1.0))
    assert report.value == 0.0


def test_luxemburg_weights() -> None:
    gauge = OrliczGauge("exp", 2.0)

    weighted = luxemburg_norm([0.0, 2.0], gauge, weights=[0.25, 0.75])
    repeated = luxemburg_norm([0.0, 2.0, 2.0, 2.0], gauge)
    assert math.isclose(weighted.value, repeated.value, rel_tol=1.0e-10)

    with pytest.raises(ValueError, match="weights"):
        luxemburg_norm([0.0, 2.0], gauge, weights=[1.0])


@pytest.mark.parametrize(
    "gauge",
    [OrliczGauge("exp", 2.0), OrliczGauge("exp", 0.5), OrliczGauge("llog", 0.5)],
)
def test_orlicz_norm_properties(gauge: OrliczGauge) -> None:
    rng = np.random.default_rng(seed=42)
    g = GridFunction(rng.normal(size=(8, 16)))

    value = orlicz_norm(g, gauge).value
    assert value > 0

    scaled = orlicz_norm(GridFunction(-3.0 * g.values), gauge).value
    assert math.isclose(scaled, 3.0 * value, rel_tol=1.0e-10)

    larger = orlicz_norm(GridFunction(np.abs(g.values) + 0.5), gauge).value
    assert larger >= value


def test_exp_orlicz_via_pnorms() -> None:
    rng = np.random.default_rng(seed=42)

    for g in (
        GridFunction.constant(2.0, (3, 3)),
        GridFunction(rng.normal(size=(16, 16))),
        GridFunction(np.sign(rng.normal(size=(4, 8)))),
    ):
        direct = orlicz_norm(g, OrliczGauge("exp", 2.0)).value
        via_p = exp_orlicz_via_pnorms(g, 2.0)
        assert 0.1 <= via_p / direct <= 10

    with pytest.raises(ValueError, match="positive"):
        exp_orlicz_via_pnorms(g, 0.0)


def test_pnorm_report() -> None:
    g = GridFunction(np.array([[1.0, -1.0], [3.0, -3.0]]))
    report = pnorm_report(g, 2)

    assert report.norm == "L^2"
    assert report.method == "exact"
    assert math.isclose(report.value, math.sqrt(5.0))


def test_dual_pairing() -> None:
    rng = np.random.default_rng(seed=42)
    for _ in range(8):
        f = GridFunction(rng.normal(size=(8, 8)))
        g = GridFunction(rng.normal(size=(4, 16)))

        result = dual_pairing_check(f, g, 0.5)
        assert result.ratio is not None
        assert 0 <= result.ratio <= 100

        # the inner product is taken on the common refinement
        fine = np.repeat(f.values, 2, axis=1) * np.repeat(g.values, 2, axis=0)
        assert result.inner == pytest.approx(np.sum(fine) / fine.size)

    result = dual_pairing_check(
        GridFunction.constant(0.0, (2, 2)), GridFunction.constant(1.0, (2, 2)), 0.5
    )
    assert result.ratio is None


# }}}


# {{{ test_rademacher


def test_rademacher_sums() -> None:
    sums = rademacher_sums([1.0, 2.0])
    assert sorted(sums.tolist()) == [-3.0, -1.0, 1.0, 3.0]

    with pytest.raises(ValueError, match="at most"):
        rademacher_sums([1.0] * 64)


@pytest.mark.parametrize("p", [1.0, 2.0, 3.0, 6.0])
def test_rademacher_checks(p: float) -> None:
    rng = np.random.default_rng(seed=42)

    for size in (1, 4, 12):
        c = rng.normal(size=size).tolist()
        result = rademacher_checks(c, lam=0.7, p=p)

        assert result.passed
        assert math.isclose(result.l2_norm, math.sqrt(sum(x * x for x in c)))
        if p == 2.0:
            assert math.isclose(result.pnorm, result.l2_norm, rel_tol=1.0e-12)


def test_rademacher_degenerate() -> None:
    result = rademacher_checks([0.0, 0.0], lam=1.0, p=2.0)
    assert result.mgf == result.mgf_bound == 1.0
    assert result.passed

    with pytest.raises(ValueError, match="at least 1"):
        rademacher_checks([1.0], lam=1.0, p=0.5)


# }}}


# {{{ test_discrepancy_norms


def test_dn_norm_suite(tmp_config: TemporaryConfiguration) -> None:
    pointset = gen_vandercorput(5)
    reports = dn_norm_suite(pointset, (6, 6))

    norms = {r.meta["metric"]: r for r in reports}
    assert sorted(norms) == ["l1", "l1logl", "l2"]
    assert norms["l1"].value <= norms["l2"].value

    # in dimension 2 the gauge is L (log L)^0
    assert math.isclose(norms["l1logl"].value, norms["l1"].value, rel_tol=1.0e-10)

    for report in reports:
        assert report.meta["resolution"] == (6, 6)
        assert report.meta["refined"] > 0
        assert isinstance(report.meta["converged"], bool)


@pytest.mark.config_setup(settings={"grid-max-level": "12"})
def test_dn_norm_suite_cap(tmp_config: TemporaryConfiguration) -> None:
    pointset = gen_random(16, 3, seed=1)
    reports = dn_norm_suite(pointset, (4, 4, 4))

    assert len(reports) == 3
    assert all("refined" not in r.meta for r in reports)


def test_empirical_pnorms(tmp_config: TemporaryConfiguration) -> None:
    pointset = gen_random(20, 2, seed=3)
    pnorms = empirical_pnorms(pointset, (5, 5))

    assert sorted(pnorms) == [0.25, 0.5, 0.75]
    values = [pnorms[p] for p in sorted(pnorms)]
    assert values == sorted(values)
    assert values[-1] <= grid_pnorm(cell_average_DN(pointset, (5, 5)), 1)


# }}}


if __name__ == "__main__":
    import sys

    if len(sys.argv) > 1:
        exec(sys.argv[1])
    else:
        pytest.main([__file__])
