# SPDX-FileCopyrightText: 2024 dyadic-discrepancy developers
# SPDX-License-Identifier: MIT

"""Named suites of numerical checks.

Each suite returns a list of :class:`Check` records. A check that cannot run
because an enumeration or a grid would exceed its configured limit is
reported as skipped (``passed`` is *None*) instead of failing.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Callable, Sequence
from dataclasses import asdict, dataclass
from typing import Any

import numpy as np

from dyadic_discrepancy.config import (
    DEFAULT_EPSILON,
    EXPANSION_MAX_K,
    EXPANSION_MAX_N,
    GAMMA_ENUMERATION_MAX_H,
    HALASZ_SQRT_N_BAND,
    HARDY_GROWTH_BAND,
)
from dyadic_discrepancy.discrepancy import (
    SignedRFunction,
    build_rfunction,
    cell_average_DN,
    haar_coeff_DN,
    pair_DN_grid,
    pair_DN_grid_reference,
    pair_DN_rfunction,
    rvec_floor,
    shape_coefficients_DN,
)
from dyadic_discrepancy.dualcert import (
    CertificateConfig,
    CombinatorialGuardError,
    count_products,
    count_products_brute,
    expansion_counts,
    gamma_prime,
    gamma_prime_enumeration,
    gamma_prime_grid,
    halasz_certificate,
    halasz_expansion,
    main_certificate,
    planar_factors,
    subset_product_sums,
    verify_Gv_expansion,
    verify_product_rule,
)
from dyadic_discrepancy.dyadic import (
    DyadicRectangle,
    GridFunction,
    ResolutionError,
    ShapeVector,
    accumulate_into,
    enumerate_shapes,
    grid_combine,
    grid_integral,
    grid_pnorm,
    haar_coefficients,
    rfunction_values,
)
from dyadic_discrepancy.logging import get_logger
from dyadic_discrepancy.pointset import FAMILIES, PointSet, generate

log = get_logger(__name__)

SUITES = ("props", "expansion", "khintchine", "hardy")
"""Names of the available suites (``all`` runs every one of them)."""


# {{{ records


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool | None
    """Outcome of the check, or *None* if it was skipped."""
    measured: Any = None
    bound: Any = None
    notes: str = ""

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class VerifyOptions:
    suite: str = "all"
    max_n: int = 8
    """Largest index *n* used by the point set families."""
    family: str = "vdc"
    """Point set family. ``vdc`` only exists in dimension 2 and is replaced
    by ``halton`` in higher dimensions."""
    seed: int = 0
    epsilon: float = DEFAULT_EPSILON

    def __post_init__(self) -> None:
        if self.suite != "all" and self.suite not in SUITES:
            raise ValueError(f"Unknown suite '{self.suite}'")

        if self.family not in FAMILIES:
            raise ValueError(f"Unknown point set family '{self.family}'")

        if self.max_n < 2:
            raise ValueError(f"Largest index must be at least 2: '{self.max_n}'")


def family_pointset(family: str, d: int, n: int, seed: int = 0) -> PointSet:
    """The point set of :math:`N = 2^{n - 1}` points used for index *n*."""
    if family == "vdc" and d != 2:
        family = "halton"

    return generate(family, 1 << (n - 1), d, seed=seed)


def guarded(name: str, func: Callable[[], Check | list[Check]]) -> list[Check]:
    """Run *func*, turning guard and resolution errors into skipped checks."""
    try:
        result = func()
    except (CombinatorialGuardError, ResolutionError) as exc:
        log.warning("Skipping '%s': %s", name, exc)
        return [Check(name, None, notes=f"skipped: {exc}")]

    return result if isinstance(result, list) else [result]


def summarize(checks: Sequence[Check]) -> tuple[int, int, int]:
    """Number of passed, failed and skipped checks."""
    passed = sum(1 for c in checks if c.passed is True)
    failed = sum(1 for c in checks if c.passed is False)
    return passed, failed, len(checks) - passed - failed


# }}}


# {{{ props


def _check_rvec(family: str, d: int, n: int, seed: int) -> Check:
    pointset = family_pointset(family, d, n, seed)
    worst = min(
        pair_DN_rfunction(pointset, build_rfunction(pointset, shape))
        for shape in enumerate_shapes(n, d)
    )

    floor = rvec_floor(d)
    return Check(
        f"props.rvec[{family},d={d},n={n}]",
        worst >= floor,
        measured=worst,
        bound=floor,
        notes="min over shapes of <D_N, f_r>",
    )


def _check_beyond_index(
    family: str, d: int, n: int, seed: int, rng: np.random.Generator,
    nsamples: int = 100,
) -> Check:
    pointset = family_pointset(family, d, n, seed)

    worst = 0.0
    for index in range(n + 1, 2 * n + 1):
        for shape in enumerate_shapes(index, d):
            bound = pointset.npoints * 2.0 ** (-index)
            for _ in range(nsamples):
                f = SignedRFunction.random(shape, rng)
                worst = max(worst, abs(pair_DN_rfunction(pointset, f)) / bound)

    return Check(
        f"props.beyond_index[{family},d={d},n={n}]",
        worst <= 1.0,
        measured=worst,
        bound=1.0,
        notes=f"max |<D_N, f_s>| / (N 2^-|s|) over {nsamples} random signs",
    )


def _check_closed_form(d: int, seed: int) -> list[Check]:
    from dyadic_discrepancy.pointset import gen_random

    rng = np.random.default_rng(seed)
    pointset = gen_random(32, d, seed=seed)
    level = 8 if d == 1 else 6

    grid = cell_average_DN(pointset, (level + 1,) * d)
    scale = float(pointset.npoints)

    error = 0.0
    for components in itertools.product(range(1, level + 1), repeat=d):
        shape = ShapeVector(components)
        closed = shape_coefficients_DN(pointset, shape).values.ravel()
        coeffs = haar_coefficients(grid, shape).ravel()
        error = max(error, float(np.max(np.abs(coeffs - closed))))

    checks = [
        Check(
            f"props.closed_form_vs_grid[d={d}]",
            error <= 1.0e-12 * scale,
            measured=error,
            bound=1.0e-12 * scale,
            notes="Haar coefficients of the cell averages",
        )
    ]

    error = 0.0
    for _ in range(10):
        levels = rng.integers(0, level + 1, size=d)
        offsets = [int(rng.integers(0, 1 << int(m))) for m in levels]
        rect = DyadicRectangle.from_offsets(levels.tolist(), offsets)

        direct = pair_DN_grid(pointset, GridFunction.from_haar(rect))
        error = max(error, abs(direct - haar_coeff_DN(pointset, rect).value))

    checks.append(
        Check(
            f"props.closed_form_vs_pairing[d={d}]",
            error <= 1.0e-12 * scale,
            measured=error,
            bound=1.0e-12 * scale,
            notes="grid pairing with single Haar functions",
        )
    )

    g = GridFunction(rng.normal(size=(4,) * d))
    direct = pair_DN_grid(pointset, g)
    reference = pair_DN_grid_reference(pointset, g)
    checks.append(
        Check(
            f"props.grid_pairing_reference[d={d}]",
            abs(direct - reference) <= 1.0e-10 * max(1.0, abs(reference)),
            measured=abs(direct - reference),
            bound=1.0e-10 * max(1.0, abs(reference)),
        )
    )

    mismatches = 0
    for _ in range(5):
        shape = ShapeVector(tuple(int(r) for r in rng.integers(1, 4, size=d)))
        f = SignedRFunction.random(shape, rng)
        values = f.grid().values
        for x in pointset.points:
            cell = tuple(
                int(math.ldexp(xt, r + 1)) for xt, r in zip(x, shape.components)
            )
            mismatches += int(values[cell] != f(x))

    checks.append(
        Check(
            f"props.rfunction_pointwise[d={d}]",
            mismatches == 0,
            measured=mismatches,
            bound=0,
            notes="pointwise values against the grid at resolution r + 1",
        )
    )

    return checks


def _check_haar_moment(max_level: int = 8) -> Check:
    from dyadic_discrepancy.dyadic import DyadicInterval, haar_moment

    mismatches = [
        (k, j)
        for k in range(max_level + 1)
        for j in range(1 << k)
        if haar_moment(DyadicInterval(k, j)) != math.ldexp(1.0, -2 * k - 2)
    ]

    return Check(
        "props.haar_moment",
        not mismatches,
        measured=len(mismatches),
        bound=0,
        notes=f"int x h_I dx = |I|^2 / 4 for levels <= {max_level}",
    )


def _check_halasz(family: str, n: int, epsilon: float, seed: int) -> list[Check]:
    pointset = family_pointset(family, 2, n, seed)
    report = halasz_certificate(pointset, CertificateConfig(n=n, epsilon=epsilon))
    l1 = grid_pnorm(cell_average_DN(pointset, (n, n)), 1)

    prefix = f"props.halasz[{family},n={n}]"
    assert report.leading_term is not None
    assert report.leading_floor is not None

    checks = [
        Check(f"{prefix}.positive", report.pairing > 0, measured=report.pairing,
              bound=0.0),
        Check(f"{prefix}.sup_norm", report.sup_norm <= 1.0,
              measured=report.sup_norm, bound=1.0),
        Check(f"{prefix}.leading_term", report.leading_term >= report.leading_floor,
              measured=report.leading_term, bound=report.leading_floor),
        Check(f"{prefix}.implied_l1", report.implied_l1_bound <= l1 * (1 + 1.0e-9),
              measured=report.implied_l1_bound, bound=l1,
              notes="pairing / sup norm against the L^1 norm at resolution (n, n)"),
    ]

    # the band is only derived for van der Corput sets at the default epsilon
    lower, upper = HALASZ_SQRT_N_BAND
    ratio = report.pairing / math.sqrt(n)
    banded = family == "vdc" and epsilon == DEFAULT_EPSILON
    checks.append(
        Check(f"{prefix}.sqrt_n_band", (lower <= ratio <= upper) if banded else None,
              measured=ratio, bound=[lower, upper],
              notes="pairing / sqrt(n)" if banded else "pairing / sqrt(n), no band")
    )

    return checks


def _check_main(family: str, ns: Sequence[int], epsilon: float, seed: int,
                ) -> list[Check]:
    checks = []
    previous = None
    for n in ns:
        pointset = family_pointset(family, 3, n, seed)
        report = main_certificate(pointset, CertificateConfig(n=n, epsilon=epsilon))

        prefix = f"props.main[{family},d=3,n={n}]"
        negative = sorted(k for k, v in report.per_prefix.items() if v <= 0)
        # positivity is only claimed for the Halton sets
        checks.append(
            Check(f"{prefix}.per_prefix_positive",
                  not negative if family == "halton" else None,
                  measured=min(report.per_prefix.values()), bound=0.0,
                  notes=f"non-positive prefixes: {negative}" if negative else "")
        )

        assert report.per_prefix_sup is not None
        assert report.linearity_residual is not None
        assert report.quotient_bound is not None
        tol = 1.0e-9 * max(1.0, abs(report.pairing))
        checks.extend([
            Check(f"{prefix}.per_prefix_sup", report.per_prefix_sup <= 1.0,
                  measured=report.per_prefix_sup, bound=1.0),
            Check(f"{prefix}.linearity", report.linearity_residual <= tol,
                  measured=report.linearity_residual, bound=tol),
            Check(f"{prefix}.quotient", report.quotient_bound > 0,
                  measured=report.quotient_bound, bound=0.0,
                  notes="pairing / exp(L^{2/(d-1)}) norm"),
        ])

        if previous is not None:
            checks.append(
                Check(f"{prefix}.quotient_growth", report.quotient_bound >= previous,
                      measured=report.quotient_bound, bound=previous)
            )
        previous = report.quotient_bound

    return checks


def suite_props(opts: VerifyOptions) -> list[Check]:
    rng = np.random.default_rng(opts.seed)
    checks = []

    for d, nmax in ((2, 14), (3, 10)):
        family = opts.family if d == 2 or opts.family != "vdc" else "halton"
        for n in range(d, min(opts.max_n, nmax) + 1):
            checks.extend(guarded(
                f"props.rvec[{family},d={d},n={n}]",
                lambda d=d, n=n, family=family: _check_rvec(family, d, n, opts.seed),
            ))

        for n in range(d, min(opts.max_n, 6 if d == 2 else 5) + 1):
            checks.extend(guarded(
                f"props.beyond_index[{family},d={d},n={n}]",
                lambda d=d, n=n, family=family: _check_beyond_index(
                    family, d, n, opts.seed, rng),
            ))

    checks.append(_check_haar_moment())
    for d in (1, 2, 3):
        checks.extend(guarded(
            f"props.closed_form[d={d}]",
            lambda d=d: _check_closed_form(d, opts.seed),
        ))

    for n in range(4, min(opts.max_n, 12) + 1):
        checks.extend(guarded(
            f"props.halasz[n={n}]",
            lambda n=n: _check_halasz(opts.family, n, opts.epsilon, opts.seed),
        ))

    family = "random" if opts.family == "random" else "halton"
    ns = [n for n in (8, 10) if n <= opts.max_n]
    if ns:
        checks.extend(guarded(
            "props.main[d=3]",
            lambda: _check_main(family, ns, opts.epsilon, opts.seed),
        ))

    return checks


# }}}


# {{{ expansion


def _check_counts(n: int) -> Check:
    cases = 0
    mismatches = []
    for v in range(2, n + 1):
        for s1, s2 in itertools.product(range(1, n), repeat=2):
            shape = ShapeVector((s1, s2))
            if shape.index < n + v - 1:
                continue

            cases += 1
            if count_products(n, shape, v) != count_products_brute(n, shape, v):
                mismatches.append(f"{shape}/v={v}")

    return Check(
        f"expansion.count_products[n={n}]",
        not mismatches,
        measured=cases,
        notes=f"mismatches: {mismatches}" if mismatches else "cases compared",
    )


def _check_gv_expansion(n: int, k: int, family: str, seed: int) -> list[Check]:
    result = verify_Gv_expansion(n, k)
    table = expansion_counts(n - 1, k)
    recurrence = all(table[k][v] == c for v, c in result.coefficients.items())

    prefix = f"expansion.gv[n={n},k={k}]"
    checks = [
        Check(f"{prefix}.coefficients", result.passed and recurrence,
              measured=result.coefficients,
              notes=f"C0 = {result.c0_measured:.6g}"),
    ]
    if result.closed_form_k3 is not None:
        checks.append(
            Check(f"{prefix}.closed_form", result.closed_form_k3,
                  measured=result.coefficients.get(1), bound=3 * (n - 1) - 2)
        )

    # the same identity on actual r functions of a point set
    pointset = family_pointset(family, 2, n, seed)
    cfg = CertificateConfig(n=n)
    factors = planar_factors(pointset, cfg)
    sums = subset_product_sums(factors, min(k, n - 1))

    total = np.sum(factors, axis=0)
    rhs = np.zeros_like(total)
    for v, c in result.coefficients.items():
        rhs += c * sums[v]
    residual = int(np.max(np.abs(total**k - rhs)))

    checks.append(
        Check(f"{prefix}.grid_identity", residual == 0, measured=residual, bound=0)
    )

    return checks


def _check_gamma() -> Check:
    mismatches = [
        (m, h)
        for h in range(1, GAMMA_ENUMERATION_MAX_H + 1)
        for m in (2, 4, 6)
        if gamma_prime(m, h) != gamma_prime_enumeration(m, h)
    ]

    return Check(
        "expansion.gamma_prime",
        not mismatches,
        measured=mismatches or None,
        notes="closed form against the enumeration of sign patterns",
    )


def _check_gamma_grid(n: int) -> Check:
    mismatches = [
        m for m in (2, 4) if gamma_prime_grid(n, m) != gamma_prime(m, n - 1)
    ]

    return Check(
        f"expansion.gamma_prime_grid[n={n}]",
        not mismatches,
        measured=mismatches or None,
        notes="moments of the hyperbolic sum on the grid",
    )


def _check_product_rule(n: int, seed: int) -> Check:
    rng = np.random.default_rng(seed)
    shapes = enumerate_shapes(n, 2)

    cases = 0
    failures = []
    for size in (1, 2, 3):
        for subset in itertools.combinations(shapes, size):
            cases += 1
            result = verify_product_rule(subset, rng=rng)
            if not result.holds:
                failures.append(", ".join(str(s) for s in subset))

    return Check(
        f"expansion.product_rule[n={n}]",
        not failures,
        measured=cases,
        notes=f"failures: {failures}" if failures else "subsets of size <= 3",
    )


def _check_halasz_expansion(n: int, family: str, epsilon: float, seed: int,
                            ) -> list[Check]:
    pointset = family_pointset(family, 2, n, seed)
    result = halasz_expansion(pointset, CertificateConfig(n=n, epsilon=epsilon))

    worst = max(
        (abs(result.pairings[v]) / bound
         for v, bound in result.tail_bounds.items() if bound > 0),
        default=0.0,
    )

    prefix = f"expansion.halasz[{family},n={n}]"
    return [
        Check(f"{prefix}.residual", result.residual <= 1.0e-8,
              measured=result.residual, bound=1.0e-8,
              notes=f"direct pairing {result.direct:.6g}"),
        Check(f"{prefix}.tail_bounds", worst <= 1.0 + 1.0e-9,
              measured=worst, bound=1.0,
              notes="max |<D_N, G_v>| / bound over v >= 3"),
    ]


def suite_expansion(opts: VerifyOptions) -> list[Check]:
    from dyadic_discrepancy.dualcert import build_Gv

    checks = []
    for n in range(3, min(opts.max_n, 10) + 1):
        checks.append(_check_counts(n))

    for n in range(2, min(opts.max_n, EXPANSION_MAX_N) + 1):
        for k in (1, 3, 5, 7):
            if k > EXPANSION_MAX_K:
                continue

            checks.extend(guarded(
                f"expansion.gv[n={n},k={k}]",
                lambda n=n, k=k: _check_gv_expansion(n, k, opts.family, opts.seed),
            ))

    checks.append(_check_gamma())
    for n in range(2, min(opts.max_n, 8) + 1):
        checks.extend(guarded(
            f"expansion.gamma_prime_grid[n={n}]", lambda n=n: _check_gamma_grid(n)
        ))

    for n in range(3, min(opts.max_n, 8) + 1):
        checks.append(_check_product_rule(n, opts.seed))

    family = "random" if opts.family == "random" else "vdc"
    for n in range(3, min(opts.max_n, EXPANSION_MAX_N) + 1):
        pointset = family_pointset(family, 2, n, opts.seed)
        cfg = CertificateConfig(n=n, epsilon=opts.epsilon)
        means = [
            grid_integral(build_Gv(pointset, v, cfg)) for v in range(1, n)
        ]
        checks.append(
            Check(f"expansion.gv_mean_zero[{family},n={n}]",
                  all(m == 0 for m in means), measured=max(map(abs, means)), bound=0)
        )

        checks.extend(guarded(
            f"expansion.halasz[{family},n={n}]",
            lambda n=n: _check_halasz_expansion(n, family, opts.epsilon, opts.seed),
        ))

    return checks


# }}}


# {{{ khintchine


def haar_series_corpus(
    rng: np.random.Generator,
    size: int = 50,
    *,
    d: int = 2,
    max_level: int = 4,
) -> list[GridFunction]:
    """Random finite sums :math:`\\sum_j a_j f_j` of :math:`\\mathsf{r}` functions."""
    resolution = (max_level + 1,) * d
    corpus = []
    while len(corpus) < size:
        total = np.zeros(tuple(1 << m for m in resolution), dtype=np.float64)
        for _ in range(int(rng.integers(1, 5))):
            levels = rng.integers(1, max_level + 1, size=d)
            shape = ShapeVector(tuple(int(s) for s in levels))
            f = SignedRFunction.random(shape, rng)
            accumulate_into(total, rng.normal() * rfunction_values(f.shape, f.signs))

        if np.any(total != 0):
            corpus.append(GridFunction(total))

    return corpus


def _check_rademacher(rng: np.random.Generator, nvectors: int = 200) -> list[Check]:
    from dyadic_discrepancy.norms import rademacher_checks

    mgf_failures = 0
    khintchine_ratio = 0.0
    exp_ratio = 0.0
    l2_error = 0.0
    for _ in range(nvectors):
        c = rng.normal(size=int(rng.integers(1, 13))).tolist()
        lam = float(rng.uniform(0.1, 2.0))
        for p in (2, 4, 6, 8):
            report = rademacher_checks(c, lam, p)
            mgf_failures += int(not report.mgf_holds)
            khintchine_ratio = max(khintchine_ratio,
                                   report.pnorm / report.khintchine_bound)
            exp_ratio = max(exp_ratio, report.exp_l2_norm / report.l2_norm)
            if p == 2:
                l2_error = max(l2_error,
                               abs(report.pnorm - report.l2_norm) / report.l2_norm)

    return [
        Check("khintchine.mgf", mgf_failures == 0, measured=mgf_failures, bound=0,
              notes=f"strict inequality over {nvectors} random vectors"),
        Check("khintchine.pnorm", khintchine_ratio <= 1.0 + 1.0e-12,
              measured=khintchine_ratio, bound=1.0,
              notes="max ||sum c_j r_j||_p / (sqrt(p) ||c||_2)"),
        Check("khintchine.exp_l2", exp_ratio <= 3.0 * (1 + 1.0e-12),
              measured=exp_ratio, bound=3.0),
        Check("khintchine.l2_identity", l2_error <= 1.0e-12,
              measured=l2_error, bound=1.0e-12),
    ]


def _check_orlicz(rng: np.random.Generator) -> list[Check]:
    from dyadic_discrepancy.norms import (
        OrliczGauge,
        dual_pairing_check,
        exp_orlicz_via_pnorms,
        orlicz_norm,
    )

    one = GridFunction.constant(1.0, (1,))
    value = orlicz_norm(one, OrliczGauge("exp", 2.0)).value
    expected = 1.0 / math.sqrt(math.log(2.0))
    checks = [
        Check("khintchine.orlicz_constant", abs(value - expected) <= 1.0e-9,
              measured=value, bound=expected,
              notes="exp(L^2) norm of the constant 1"),
    ]

    corpus = haar_series_corpus(rng)

    residual = 0.0
    band = [math.inf, 0.0]
    homogeneity = 0.0
    monotone = True
    for g in corpus:
        for alpha in (1.0, 2.0):
            report = orlicz_norm(g, OrliczGauge("exp", alpha))
            assert report.residual is not None
            residual = max(residual, abs(report.residual))

            ratio = exp_orlicz_via_pnorms(g, alpha) / report.value
            band = [min(band[0], ratio), max(band[1], ratio)]

        gauge = OrliczGauge("exp", 2.0)
        base = orlicz_norm(g, gauge).value
        scaled = orlicz_norm(grid_combine(g, GridFunction.constant(-3.0, g.resolution),
                                          "mul"), gauge).value
        homogeneity = max(homogeneity, abs(scaled - 3.0 * base) / (3.0 * base))

        damped = GridFunction(g.values * rng.uniform(0.0, 1.0, size=g.values.shape))
        monotone = monotone and orlicz_norm(damped, gauge).value <= base * (1 + 1.0e-9)

    dual = 0.0
    for f, g in itertools.pairwise(corpus):
        for alpha in (0.5, 1.0):
            ratio = dual_pairing_check(f, g, alpha).ratio
            if ratio is not None:
                dual = max(dual, ratio)

    checks.extend([
        Check("khintchine.orlicz_residual", residual <= 1.0e-9,
              measured=residual, bound=1.0e-9),
        Check("khintchine.pnorm_equivalence", 0.1 <= band[0] and band[1] <= 10.0,
              measured=band, bound=[0.1, 10.0],
              notes="sup_p p^(-1/alpha) ||g||_p / ||g||_exp(L^alpha)"),
        Check("khintchine.homogeneity", homogeneity <= 1.0e-9,
              measured=homogeneity, bound=1.0e-9),
        Check("khintchine.monotone", monotone),
        Check("khintchine.dual_pairing", dual <= 100.0, measured=dual, bound=100.0),
    ])

    return checks


def suite_khintchine(opts: VerifyOptions) -> list[Check]:
    rng = np.random.default_rng(opts.seed)
    return [*_check_rademacher(rng), *_check_orlicz(rng)]


# }}}


# {{{ hardy


def _check_tilde(d: int, seed: int) -> list[Check]:
    from dyadic_discrepancy.hardy import int_t, tilde_DN_grid
    from dyadic_discrepancy.pointset import gen_random

    pointset = gen_random(16, d, seed=seed)
    level = 5 if d <= 2 else 3
    tilde = tilde_DN_grid(pointset, (level + 1,) * d)

    error = 0.0
    for components in itertools.product(range(1, level + 1), repeat=d):
        shape = ShapeVector(components)
        closed = shape_coefficients_DN(pointset, shape).values.ravel()
        coeffs = haar_coefficients(tilde, shape).ravel()
        error = max(error, float(np.max(np.abs(coeffs - closed))))

    annihilated = max(
        float(np.max(np.abs(int_t(tilde, t).values))) for t in range(1, d + 1)
    )

    return [
        Check(f"hardy.tilde_coefficients[d={d}]", error <= 1.0e-10,
              measured=error, bound=1.0e-10),
        Check(f"hardy.tilde_annihilated[d={d}]", annihilated <= 1.0e-10,
              measured=annihilated, bound=1.0e-10,
              notes="max over t of |Int_t tilde D_N|"),
    ]


def _check_hardy_lower(family: str, d: int, n: int, p: float, seed: int,
                       ) -> list[Check]:
    from dyadic_discrepancy.hardy import hardy_lower_report

    pointset = family_pointset(family, d, n, seed)
    report = hardy_lower_report(pointset, p, n=n)

    prefix = f"hardy.lower[{family},d={d},n={n},p={p:g}]"
    lower, upper = HARDY_GROWTH_BAND
    return [
        Check(f"{prefix}.good_sets", report.good_sets_hold,
              measured=report.min_good_measure, bound=0.5),
        Check(f"{prefix}.level_mass", report.level_mass_holds,
              measured=report.level_mass, bound=0.25),
        Check(f"{prefix}.sum_pnorm", report.sum_pnorm_holds,
              measured=report.sum_pnorm, bound=report.sum_pnorm_floor),
        Check(f"{prefix}.square_pnorm", report.square_holds,
              measured=report.square_pnorm, bound=report.square_floor),
        Check(f"{prefix}.growth_band", lower <= report.growth_ratio <= upper,
              measured=report.growth_ratio, bound=[lower, upper],
              notes="||S D_N||_p / n^((d-1)/2)"),
    ]


def _check_square_functions(family: str, n: int, epsilon: float, seed: int,
                            ) -> list[Check]:
    from dyadic_discrepancy.hardy import (
        chang_wilson_wolff_ratio,
        iterated_square,
        littlewood_paley_constants,
    )

    pointset = family_pointset(family, 3, n, seed)
    cfg = CertificateConfig(n=n, epsilon=epsilon)

    sup = float(np.max(iterated_square(pointset, cfg, 1).values))
    lp = littlewood_paley_constants(pointset, cfg)
    ratio = chang_wilson_wolff_ratio(pointset, cfg)

    prefix = f"hardy.square[{family},d=3,n={n}]"
    return [
        Check(f"{prefix}.s1_sup", sup <= 1.0 + 1.0e-12, measured=sup, bound=1.0),
        Check(f"{prefix}.littlewood_paley", lp.constant <= 1.0,
              measured=lp.constant, bound=1.0,
              notes=f"ratios {', '.join(f'{v:.3g}' for v in lp.ratios.values())}"),
        Check(f"{prefix}.chang_wilson_wolff", ratio <= 10.0,
              measured=ratio, bound=10.0),
    ]


def _check_maximal(family: str, n: int, seed: int) -> Check:
    from dyadic_discrepancy.hardy import (
        ShapeSet,
        maximal_function,
        square_function_DN,
        tilde_DN_grid,
    )

    pointset = family_pointset(family, 2, n, seed)
    shapes = ShapeSet.hyperbolic(n, 2)
    resolution = shapes.resolution

    tilde = tilde_DN_grid(pointset, resolution)
    maximal = grid_pnorm(maximal_function(tilde, resolution), 1)
    square = grid_pnorm(square_function_DN(pointset, shapes), 1)

    return Check(
        f"hardy.maximal_vs_square[{family},n={n}]",
        None,
        measured=maximal / square if square > 0 else math.inf,
        notes="||M tilde D_N||_1 / ||S tilde D_N||_1 (reported only)",
    )


def square_function_indices(max_n: int) -> list[int]:
    """Indices used by the square function checks in dimension 3.

    These are :math:`n \\in \\{8, 10\\}` up to *max_n*, or just *max_n* for
    smaller runs.
    """
    indices = [n for n in (8, 10) if n <= max_n]
    if not indices and max_n >= 4:
        indices = [max_n]

    return indices


def suite_hardy(opts: VerifyOptions) -> list[Check]:
    checks = []
    for d in (1, 2, 3):
        checks.extend(guarded(
            f"hardy.tilde[d={d}]", lambda d=d: _check_tilde(d, opts.seed)
        ))

    for d, nmax in ((2, 12), (3, 8)):
        family = opts.family if d == 2 or opts.family != "vdc" else "halton"
        for n in range(d, min(opts.max_n, nmax) + 1):
            for p in (0.5, 1.0):
                checks.extend(guarded(
                    f"hardy.lower[{family},d={d},n={n},p={p:g}]",
                    lambda d=d, n=n, p=p, family=family: _check_hardy_lower(
                        family, d, n, p, opts.seed),
                ))

    family = "random" if opts.family == "random" else "halton"
    for n in square_function_indices(opts.max_n):
        checks.extend(guarded(
            f"hardy.square[{family},d=3,n={n}]",
            lambda n=n: _check_square_functions(family, n, opts.epsilon, opts.seed),
        ))

    for n in range(2, min(opts.max_n, 6) + 1):
        checks.extend(guarded(
            f"hardy.maximal_vs_square[n={n}]",
            lambda n=n: _check_maximal(opts.family, n, opts.seed),
        ))

    return checks


# }}}


# {{{ driver

_SUITE_FUNCTIONS: dict[str, Callable[[VerifyOptions], list[Check]]] = {
    "props": suite_props,
    "expansion": suite_expansion,
    "khintchine": suite_khintchine,
    "hardy": suite_hardy,
}


def run_suite(opts: VerifyOptions) -> tuple[list[Check], dict[str, float]]:
    """Run the suite named in *opts* (or all of them).

    :returns: the checks and the wall time in milliseconds of each suite.
    """
    from dyadic_discrepancy.utils import timeit

    names = SUITES if opts.suite == "all" else (opts.suite,)

    checks: list[Check] = []
    timing: dict[str, float] = {}
    for name in names:
        with timeit(f"Suite '{name}'") as timer:
            result = _SUITE_FUNCTIONS[name](opts)

        timing[name] = timer.elapsed_ms
        checks.extend(result)

        passed, failed, skipped = summarize(result)
        log.info("Suite '%s': %d passed, %d failed, %d skipped.",
                 name, passed, failed, skipped)

    return checks, timing


# }}}
