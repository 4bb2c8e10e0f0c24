# SPDX-FileCopyrightText: 2024 dyadic-discrepancy developers
# SPDX-License-Identifier: MIT

import itertools
import math

import numpy as np
import pytest

from dyadic_discrepancy.discrepancy import cell_average_DN, hyperbolic_index
from dyadic_discrepancy.dualcert import (
    CertificateConfig,
    CombinatorialGuardError,
    build_Fs,
    build_Gv,
    build_Psi,
    count_products,
    count_products_brute,
    epsilon_sweep,
    expand_hyperbolic_power,
    expansion_counts,
    gamma_prime,
    gamma_prime_enumeration,
    gamma_prime_grid,
    halasz_certificate,
    halasz_expansion,
    main_certificate,
    planar_factors,
    prefix_vectors,
    sine_weights,
    tail_bound,
    verify_Gv_expansion,
    verify_product_rule,
)
from dyadic_discrepancy.dyadic import ShapeVector, grid_pnorm
from dyadic_discrepancy.pointset import gen_halton, gen_random, gen_vandercorput
from dyadic_discrepancy.testing import TemporaryConfiguration

# {{{ test_config


def test_certificate_config(tmp_config: TemporaryConfiguration) -> None:
    cfg = CertificateConfig(n=8)
    assert cfg.s_cap == 6
    assert math.isclose(cfg.scale, 0.2 / math.sqrt(8))

    with pytest.raises(ValueError, match="at least 2"):
        CertificateConfig(n=1)

    with pytest.raises(ValueError, match=r"\(0, 1\)"):
        CertificateConfig(n=4, epsilon=1.5)

    pointset = gen_random(20, 2, seed=0)
    cfg = CertificateConfig.from_pointset(pointset)
    assert cfg.n == hyperbolic_index(20) == 6
    assert cfg.epsilon == 0.2


@pytest.mark.config_setup(settings={"epsilon": "0.05"})
def test_certificate_config_setting(tmp_config: TemporaryConfiguration) -> None:
    cfg = CertificateConfig.from_pointset(gen_vandercorput(4))
    assert cfg.n == 5
    assert cfg.epsilon == 0.05


def test_prefix_vectors() -> None:
    assert prefix_vectors(6, 2, 4) == []
    assert prefix_vectors(6, 3, 4) == [(1,), (2,), (3,), (4,)]
    assert prefix_vectors(6, 3, 2) == [(1,), (2,)]

    prefixes = prefix_vectors(6, 4, 4)
    assert len(prefixes) == 6
    assert all(sum(s) <= 4 for s in prefixes)


# }}}


# {{{ test_combinatorics


@pytest.mark.parametrize("n", [3, 4, 5, 6, 7, 8])
def test_count_products(n: int) -> None:
    for v in range(2, n + 1):
        for s1, s2 in itertools.product(range(1, n), repeat=2):
            shape = ShapeVector((s1, s2))
            if shape.index < n + v - 1:
                continue

            assert count_products(n, shape, v) == count_products_brute(n, shape, v)


def test_count_products_errors() -> None:
    with pytest.raises(ValueError, match="Subset size"):
        count_products(5, ShapeVector((4, 4)), 1)

    with pytest.raises(ValueError, match="index"):
        count_products(5, ShapeVector((2, 3)), 2)

    with pytest.raises(ValueError, match="at most 4"):
        count_products(5, ShapeVector((5, 3)), 2)

    with pytest.raises(ValueError, match="dimension 2"):
        count_products(5, ShapeVector((2, 2, 2)), 2)


def test_gamma_prime() -> None:
    for h in range(1, 11):
        assert gamma_prime(0, h) == 1
        assert gamma_prime(2, h) == h
        assert gamma_prime(4, h) == 3 * h**2 - 2 * h

        for m in (2, 4, 6, 8):
            assert gamma_prime(m, h) == gamma_prime_enumeration(m, h)

    with pytest.raises(ValueError, match="even"):
        gamma_prime(3, 4)

    with pytest.raises(CombinatorialGuardError):
        gamma_prime_enumeration(2, 40)


@pytest.mark.parametrize("n", [2, 3, 5, 7])
def test_gamma_prime_grid(n: int) -> None:
    for m in (2, 4, 6):
        assert gamma_prime_grid(n, m) == gamma_prime(m, n - 1)


@pytest.mark.parametrize("h", [1, 3, 4, 6])
def test_expansion_counts(h: int) -> None:
    kmax = 6
    table = expansion_counts(h, kmax)

    for k in range(kmax + 1):
        counts = expand_hyperbolic_power(h, k)
        for mask, c in counts.items():
            assert table[k][mask.bit_count()] == c

        # every one of the h^k monomials is counted once
        total = sum(table[k][v] * math.comb(h, v) for v in range(h + 1))
        assert total == h**k


def test_verify_Gv_expansion() -> None:
    result = verify_Gv_expansion(5, 3)
    assert result.coefficients == {1: 10, 3: 6}
    assert result.closed_form_k3
    assert result.passed

    result = verify_Gv_expansion(4, 1)
    assert result.coefficients == {1: 1}
    assert result.gamma == {1: 1.0}
    assert result.c0_measured == 0.0
    assert result.passed

    for n in range(2, 9):
        for k in (1, 3, 5, 7):
            result = verify_Gv_expansion(n, k)
            assert result.passed
            assert all(v % 2 == 1 and v <= k for v in result.coefficients)

    with pytest.raises(ValueError, match="odd"):
        verify_Gv_expansion(5, 2)

    with pytest.raises(CombinatorialGuardError):
        verify_Gv_expansion(9, 3)


@pytest.mark.parametrize(("n", "epsilon"), [(4, 0.2), (6, 0.2), (7, 0.5)])
def test_sine_weights(n: int, epsilon: float) -> None:
    h = n - 1
    weights = sine_weights(n, epsilon)
    assert sorted(weights) == list(range(1, h + 1, 2))

    # sin(eps n^-1/2 sum f) = sum_v delta(v) n^(-v/2) e_v(f) for all sign patterns
    for f in itertools.product((-1, 1), repeat=h):
        expected = math.sin(epsilon / math.sqrt(n) * sum(f))
        result = math.fsum(
            w * n ** (-v / 2)
            * sum(math.prod(c) for c in itertools.combinations(f, v))
            for v, w in weights.items()
        )
        assert math.isclose(result, expected, rel_tol=1.0e-12, abs_tol=1.0e-14)


def test_tail_bound() -> None:
    assert tail_bound(32, 6, 3) == 32 * (3 / 256 + 4 / 512 + 3 / 1024)
    assert tail_bound(32, 6, 6) == 0.0

    with pytest.raises(ValueError, match="two factors"):
        tail_bound(32, 6, 1)


# }}}


# {{{ test_product_rule


def test_product_rule() -> None:
    rng = np.random.default_rng(seed=42)
    a, b, c = ShapeVector((1, 4)), ShapeVector((2, 3)), ShapeVector((4, 1))

    result = verify_product_rule([a], rng=rng)
    assert result.holds
    assert result.shape == a
    assert not result.exceeds_index

    result = verify_product_rule([a, b], rng=rng)
    assert result.holds
    assert result.shape == ShapeVector((2, 4))
    assert result.nfactors == 2
    assert result.exceeds_index
    assert result.counterexample is None

    result = verify_product_rule([a, b, c], rng=rng)
    assert result.holds
    assert result.shape == ShapeVector((4, 4))

    # squares drop out of the product
    result = verify_product_rule({a: 2, b: 3}, rng=rng)
    assert result.holds
    assert result.nfactors == 1
    assert result.shape == b


def test_product_rule_errors() -> None:
    with pytest.raises(ValueError, match="odd multiplicity"):
        verify_product_rule({ShapeVector((1, 4)): 2})

    with pytest.raises(ValueError, match="distinct components"):
        verify_product_rule([ShapeVector((1, 4)), ShapeVector((1, 3))])

    with pytest.raises(ValueError, match="dimension 2"):
        verify_product_rule([ShapeVector((1, 1, 2))])


# }}}


# {{{ test_test_functions


def test_build_Gv(tmp_config: TemporaryConfiguration) -> None:
    n = 5
    pointset = gen_vandercorput(n - 1)
    cfg = CertificateConfig(n=n)

    factors = planar_factors(pointset, cfg)
    g1 = build_Gv(pointset, 1, cfg)
    assert np.array_equal(g1.values, sum(factors))

    psi = build_Psi(pointset, cfg)
    assert np.allclose(psi.values, np.sin(cfg.scale * g1.values))

    for v in range(1, n):
        gv = build_Gv(pointset, v, cfg)
        assert gv.resolution == (n, n)
        assert np.sum(gv.values) == 0

    with pytest.raises(ValueError, match="Subset size"):
        build_Gv(pointset, n, cfg)


@pytest.mark.config_setup(settings={"gv-max-subsets": "4"})
def test_build_Gv_guard(tmp_config: TemporaryConfiguration) -> None:
    pointset = gen_vandercorput(4)
    cfg = CertificateConfig(n=5)

    assert build_Gv(pointset, 1, cfg).resolution == (5, 5)
    with pytest.raises(CombinatorialGuardError, match="guard"):
        build_Gv(pointset, 2, cfg)


def test_build_Fs(tmp_config: TemporaryConfiguration) -> None:
    pointset = gen_halton(16, 3)
    cfg = CertificateConfig(n=6)

    fs = build_Fs(pointset, (2,), cfg)
    assert fs.resolution == (3, 4, 4)
    # a sum of three functions with values -1 and +1
    assert set(np.unique(fs.values).tolist()) <= {-3, -1, 1, 3}

    with pytest.raises(ValueError, match="at least 3"):
        build_Fs(gen_vandercorput(4), (1,), cfg)

    with pytest.raises(ValueError, match="components"):
        build_Fs(pointset, (1, 1), cfg)

    with pytest.raises(ValueError, match="cutoff"):
        build_Fs(pointset, (10,), CertificateConfig(n=12))


# }}}


# {{{ test_certificates


@pytest.mark.parametrize("n", [4, 6, 8])
def test_halasz_certificate(tmp_config: TemporaryConfiguration, n: int) -> None:
    pointset = gen_vandercorput(n - 1)
    report = halasz_certificate(pointset, CertificateConfig(n=n))

    assert report.resolution == (n, n)
    assert report.pairing > 0
    assert 0 < report.sup_norm <= 1

    assert report.leading_term is not None
    assert report.leading_floor is not None
    assert report.leading_term >= report.leading_floor > 0

    l1 = grid_pnorm(cell_average_DN(pointset, (n, n)), 1)
    assert report.implied_l1_bound <= l1 * (1 + 1.0e-9)

    with pytest.raises(ValueError, match="dimension 2"):
        halasz_certificate(gen_random(8, 3), CertificateConfig(n=n))


@pytest.mark.parametrize("n", [4, 6])
def test_halasz_expansion(tmp_config: TemporaryConfiguration, n: int) -> None:
    pointset = gen_vandercorput(n - 1)
    result = halasz_expansion(pointset, CertificateConfig(n=n))

    assert result.residual <= 1.0e-8
    assert sorted(result.pairings) == sorted(result.weights)
    for v, bound in result.tail_bounds.items():
        assert abs(result.pairings[v]) <= bound * (1 + 1.0e-9)


def test_main_certificate_planar(tmp_config: TemporaryConfiguration) -> None:
    pointset = gen_vandercorput(4)
    cfg = CertificateConfig(n=5)

    main = main_certificate(pointset, cfg)
    halasz = halasz_certificate(pointset, cfg)
    assert main.name == "main"
    assert main.pairing == halasz.pairing

    assert main.orlicz_norm is not None
    assert main.quotient_bound is not None
    assert main.orlicz_norm > 0
    assert math.isclose(main.quotient_bound, main.pairing / main.orlicz_norm)


def test_main_certificate_3d(tmp_config: TemporaryConfiguration) -> None:
    n = 6
    pointset = gen_halton(1 << (n - 1), 3)
    report = main_certificate(pointset, CertificateConfig(n=n))

    assert report.d == 3
    assert report.resolution == (5, 5, 5)
    assert sorted(report.per_prefix) == ["1", "2", "3", "4"]

    assert report.per_prefix_sup is not None
    assert report.per_prefix_sup <= 1
    assert report.linearity_residual is not None
    assert report.linearity_residual <= 1.0e-9 * max(1.0, abs(report.pairing))
    assert report.orlicz_norm is not None
    assert report.orlicz_norm > 0

    data = report.to_dict()
    assert data["name"] == "main"
    assert data["per_prefix"] == report.per_prefix


def test_epsilon_sweep(tmp_config: TemporaryConfiguration) -> None:
    epsilons = [0.1, 0.2, 0.4]

    pointset = gen_vandercorput(4)
    sweep = epsilon_sweep(pointset, epsilons)
    assert [eps for eps, _ in sweep] == epsilons
    for eps, value in sweep:
        report = halasz_certificate(pointset, CertificateConfig(n=5, epsilon=eps))
        assert math.isclose(value, report.pairing, rel_tol=1.0e-12)

    pointset = gen_halton(16, 3)
    sweep = epsilon_sweep(pointset, epsilons)
    for eps, value in sweep:
        report = main_certificate(pointset, CertificateConfig(n=5, epsilon=eps))
        assert math.isclose(value, report.pairing, rel_tol=1.0e-12)


# }}}


if __name__ == "__main__":
    import sys

    if len(sys.argv) > 1:
        exec(sys.argv[1])
    else:
        pytest.main([__file__])
