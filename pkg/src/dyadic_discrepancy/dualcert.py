# SPDX-FileCopyrightText: 2024 dyadic-discrepancy developers
# SPDX-License-Identifier: MIT

"""Dual test functions for lower bounds on :math:`D_N`.

In dimension 2 the test function is

.. math::

    \\Psi = \\sin\\left(\\epsilon n^{-1/2} \\sum_{\\vec r \\in \\mathbb{H}^2_n}
        f_{\\vec r}\\right),

and in dimension :math:`d \\ge 3` it is

.. math::

    \\Phi = n^{-(d - 2)/2} \\sum_{|\\vec s| \\le 3n/4}
        \\sin(\\epsilon n^{-1/2} F_{\\vec s}),

where :math:`F_{\\vec s}` sums the :math:`\\mathsf{r}` functions whose shapes
start with the prefix :math:`\\vec s`. This module also holds the
combinatorics of products of :math:`\\mathsf{r}` functions that the expansion
of the sine in powers of the hyperbolic sum relies on.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import asdict, dataclass, field, replace
from typing import Any

import numpy as np
import numpy.typing as npt

from dyadic_discrepancy.discrepancy import (
    SignedRFunction,
    build_rfunction,
    hyperbolic_index,
    pair_DN_grid,
    pair_DN_rfunction,
    rvec_floor,
)
from dyadic_discrepancy.dyadic import (
    GridFunction,
    ShapeVector,
    accumulate_into,
    check_resolution,
    enumerate_shapes,
    grid_map,
    refine_values,
    rfunction_values,
)
from dyadic_discrepancy.logging import get_logger
from dyadic_discrepancy.pointset import PointSet
from dyadic_discrepancy.utils import pairwise_sum, timeit

log = get_logger(__name__)


# {{{ configuration


class CombinatorialGuardError(ValueError):
    """Raised when an enumeration would exceed its configured size guard."""


@dataclass(frozen=True)
class CertificateConfig:
    """Parameters of the dual test functions."""

    n: int
    """Index of the hyperbolic family :math:`\\mathbb{H}^d_n`."""
    epsilon: float = 0.2
    """The small constant :math:`\\epsilon` inside the sines."""
    s_cap_numerator: int = 3
    s_cap_denominator: int = 4
    """Prefixes are restricted to :math:`|\\vec s| \\le \\lfloor 3n / 4 \\rfloor`."""

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError(f"Index must be at least 2: '{self.n}'")

        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"Epsilon must be in (0, 1): '{self.epsilon}'")

        if self.s_cap_numerator < 1 or self.s_cap_denominator < 1:
            raise ValueError(
                "Prefix cutoff must be a positive fraction: "
                f"'{self.s_cap_numerator}/{self.s_cap_denominator}'"
            )

    @property
    def s_cap(self) -> int:
        return self.n * self.s_cap_numerator // self.s_cap_denominator

    @property
    def scale(self) -> float:
        """The factor :math:`\\epsilon n^{-1/2}` in front of the sums."""
        return self.epsilon / math.sqrt(self.n)

    @classmethod
    def from_pointset(
        cls, pointset: PointSet, epsilon: float | None = None
    ) -> CertificateConfig:
        """Choose :math:`n` with :math:`2N \\le 2^n < 4N`."""
        if epsilon is None:
            from dyadic_discrepancy import config

            epsilon = config.getfloat("epsilon")

        return cls(n=hyperbolic_index(pointset.npoints), epsilon=epsilon)


def _check_guard(name: str, size: int, limit: int) -> None:
    if size > limit:
        raise CombinatorialGuardError(
            f"{name} needs {size} terms, which exceeds the guard of {limit}"
        )


# }}}


# {{{ test functions


def _check_planar(pointset: PointSet, what: str) -> None:
    if pointset.dim != 2:
        raise ValueError(f"{what} is only defined in dimension 2: got '{pointset.dim}'")


def build_rfunctions(pointset: PointSet, shapes: Iterable[ShapeVector]
                     ) -> list[SignedRFunction]:
    return [build_rfunction(pointset, shape) for shape in shapes]


def hyperbolic_sum(
    rfunctions: Sequence[SignedRFunction], resolution: Sequence[int]
) -> npt.NDArray[np.int32]:
    """Values of :math:`\\sum_i f_i` on a grid of the given *resolution*."""
    resolution = check_resolution(resolution)
    total = np.zeros(tuple(1 << m for m in resolution), dtype=np.int32)
    for f in rfunctions:
        accumulate_into(total, rfunction_values(f.shape, f.signs))

    return total


def build_Psi(pointset: PointSet, cfg: CertificateConfig) -> GridFunction:
    """Build :math:`\\Psi` at resolution :math:`(n, n)`.

    The finest shape component in :math:`\\mathbb{H}^2_n` is :math:`n - 1`, so
    every Haar function is constant on the cells of this grid.
    """
    _check_planar(pointset, "Psi")

    with timeit(f"Psi for n = {cfg.n}"):
        shapes = enumerate_shapes(cfg.n, 2)
        total = hyperbolic_sum(build_rfunctions(pointset, shapes), (cfg.n, cfg.n))
        values = np.sin(cfg.scale * total)

    return GridFunction(values)


def prefix_vectors(n: int, d: int, cap: int) -> list[tuple[int, ...]]:
    """Prefixes :math:`\\vec s \\in \\{1, 2, \\dots\\}^{d - 2}` with a nonempty
    :math:`F_{\\vec s}` and :math:`|\\vec s| \\le` *cap*, in lexicographic order.
    """
    if d < 3:
        return []

    bound = min(cap, n - 2)
    return [
        s
        for s in itertools.product(range(1, bound + 1), repeat=d - 2)
        if sum(s) <= bound
    ]


def prefix_shapes(n: int, prefix: Sequence[int]) -> list[ShapeVector]:
    """Shapes of :math:`\\mathbb{H}^d_n` that start with *prefix*."""
    rest = n - sum(prefix)
    return [
        ShapeVector((*prefix, r, rest - r)) for r in range(1, rest)
    ]


def prefix_resolution(n: int, prefix: Sequence[int]) -> tuple[int, ...]:
    rest = n - sum(prefix)
    return (*(s + 1 for s in prefix), rest, rest)


def build_Fs(
    pointset: PointSet, prefix: Sequence[int], cfg: CertificateConfig
) -> GridFunction:
    """Build :math:`F_{\\vec s}`, the sum of the :math:`n - |\\vec s| - 1`
    :math:`\\mathsf{r}` functions with shapes starting with :math:`\\vec s`.

    The result is stored at resolution :math:`(\\vec s + 1, n - |\\vec s|,
    n - |\\vec s|)`, on which all the summands are constant.
    """
    d = pointset.dim
    prefix = tuple(int(s) for s in prefix)
    if d < 3:
        raise ValueError(f"F_s needs dimension at least 3: got '{d}'")

    if len(prefix) != d - 2 or any(s < 1 for s in prefix):
        raise ValueError(
            f"Prefix must have {d - 2} components that are >= 1: '{prefix}'"
        )

    if cfg.n - sum(prefix) - 1 < 1:
        raise ValueError(
            f"F_s is an empty sum for |s| = {sum(prefix)} and n = {cfg.n}"
        )

    if sum(prefix) > cfg.s_cap:
        raise ValueError(
            f"Prefix {prefix} exceeds the cutoff |s| <= {cfg.s_cap} for n = {cfg.n}"
        )

    shapes = prefix_shapes(cfg.n, prefix)
    values = hyperbolic_sum(
        build_rfunctions(pointset, shapes), prefix_resolution(cfg.n, prefix)
    )

    return GridFunction(values)


def phi_resolution(n: int, d: int, cap: int) -> tuple[int, ...]:
    """Common resolution of all the terms of :math:`\\Phi`."""
    prefixes = prefix_vectors(n, d, cap)
    if not prefixes:
        raise ValueError(f"No admissible prefixes for n = {n} and d = {d}")

    resolutions = [prefix_resolution(n, s) for s in prefixes]
    return tuple(max(ms) for ms in zip(*resolutions))


def build_Phi(pointset: PointSet, cfg: CertificateConfig) -> GridFunction:
    """Build :math:`\\Phi` (which is :math:`\\Psi` in dimension 2)."""
    d = pointset.dim
    if d == 2:
        return build_Psi(pointset, cfg)

    if d < 2:
        raise ValueError(f"Phi needs dimension at least 2: got '{d}'")

    resolution = check_resolution(phi_resolution(cfg.n, d, cfg.s_cap))
    with timeit(f"Phi for n = {cfg.n} at resolution {resolution}"):
        total = np.zeros(tuple(1 << m for m in resolution), dtype=np.float64)
        for prefix in prefix_vectors(cfg.n, d, cfg.s_cap):
            fs = build_Fs(pointset, prefix, cfg)
            accumulate_into(total, np.sin(cfg.scale * fs.values))
        total *= cfg.n ** (-(d - 2) / 2)

    return GridFunction(total)


def subset_product_sums(
    factors: Sequence[npt.NDArray[np.int64]], vmax: int
) -> list[npt.NDArray[np.int64]]:
    """Elementary symmetric sums :math:`E_0, \\dots, E_{v_{max}}` of *factors*."""
    sums = [np.ones_like(factors[0])]
    sums.extend(np.zeros_like(factors[0]) for _ in range(vmax))

    for i, f in enumerate(factors):
        for j in range(min(i + 1, vmax), 0, -1):
            sums[j] += f * sums[j - 1]

    return sums


def planar_factors(
    pointset: PointSet, cfg: CertificateConfig
) -> list[npt.NDArray[np.int64]]:
    resolution = check_resolution((cfg.n, cfg.n))
    return [
        refine_values(rfunction_values(f.shape, f.signs), resolution).astype(np.int64)
        for f in build_rfunctions(pointset, enumerate_shapes(cfg.n, 2))
    ]


def build_Gv(pointset: PointSet, v: int, cfg: CertificateConfig) -> GridFunction:
    """Build :math:`G_v = \\sum_{|V| = v} \\prod_{\\vec r \\in V} f_{\\vec r}`,
    summed over the subsets :math:`V \\subseteq \\mathbb{H}^2_n` of size *v*.
    """
    from scipy.special import comb

    from dyadic_discrepancy import config

    _check_planar(pointset, "G_v")
    h = cfg.n - 1
    if not 1 <= v <= h:
        raise ValueError(f"Subset size must be in [1, {h}]: '{v}'")

    _check_guard(f"G_{v}", int(comb(h, v, exact=True)), config.getint("gv-max-subsets"))

    factors = planar_factors(pointset, cfg)
    return GridFunction(subset_product_sums(factors, v)[v])


# }}}


# {{{ product rule


@dataclass(frozen=True)
class ProductRuleResult:
    holds: bool
    """If *True*, the product is an :math:`\\mathsf{r}` function of :attr:`shape`."""
    shape: ShapeVector | None
    """Coordinatewise maximum of the odd-multiplicity shapes."""
    nfactors: int
    """Number of distinct factors left after removing even multiplicities."""
    exceeds_index: bool
    """If *True*, :math:`|\\vec s| > n` for the common index *n* of the factors."""
    counterexample: tuple[int, ...] | None = None
    """Offsets of a rectangle on which the product is not :math:`\\pm h_R`."""


def verify_product_rule(
    factors: Mapping[ShapeVector, int] | Sequence[ShapeVector],
    *,
    signs: Mapping[ShapeVector, npt.ArrayLike] | None = None,
    rng: np.random.Generator | None = None,
) -> ProductRuleResult:
    """Check that a product of planar :math:`\\mathsf{r}` functions is again an
    :math:`\\mathsf{r}` function.

    :arg factors: shapes with multiplicities (a plain sequence means
        multiplicity one). Factors with even multiplicity square to one and
        are dropped; the remaining shapes must have pairwise distinct
        components in each coordinate, as distinct shapes of one
        :math:`\\mathbb{H}^2_n` do.
    :arg signs: signs of the factors; missing ones are drawn from *rng*.
    """
    if not isinstance(factors, Mapping):
        multiplicity: dict[ShapeVector, int] = {}
        for shape in factors:
            multiplicity[shape] = multiplicity.get(shape, 0) + 1
        factors = multiplicity

    odd = sorted(shape for shape, k in factors.items() if k % 2 == 1)
    if not odd:
        raise ValueError("Product rule needs at least one factor of odd multiplicity")

    if any(shape.dim != 2 for shape in odd):
        raise ValueError("Product rule is only checked in dimension 2")

    for t in range(2):
        levels = [shape.components[t] for shape in odd]
        if len(set(levels)) != len(levels):
            raise ValueError(
                f"Factors must have distinct components in coordinate {t + 1}: "
                f"{', '.join(str(s) for s in odd)}"
            )

    if rng is None:
        rng = np.random.default_rng(seed=0)

    result_shape = ShapeVector(
        tuple(max(ms) for ms in zip(*(s.components for s in odd)))
    )
    resolution = check_resolution([r + 1 for r in result_shape.components])

    product = np.ones(tuple(1 << m for m in resolution), dtype=np.int8)
    for shape in odd:
        if signs is not None and shape in signs:
            f = SignedRFunction(shape, np.asarray(signs[shape]))
        else:
            f = SignedRFunction.random(shape, rng)
        accumulate_into(product, rfunction_values(f.shape, f.signs), np.multiply)

    # NOTE: dividing by the all-plus pattern leaves the sign of each rectangle
    pattern = rfunction_values(result_shape, np.ones(result_shape.count, dtype=np.int8))
    quotient = (product * pattern).reshape(
        1 << result_shape.components[0], 2, 1 << result_shape.components[1], 2
    )
    lo = quotient.min(axis=(1, 3))
    hi = quotient.max(axis=(1, 3))
    bad = np.argwhere((lo != hi) | (np.abs(lo) != 1))

    indices = {shape.index for shape in odd}
    exceeds = (
        len(odd) >= 2 and len(indices) == 1 and result_shape.index > min(indices)
    )

    counterexample = None
    if bad.size:
        counterexample = tuple(int(j) for j in bad[0])
        log.warning("Product rule fails on rectangle %s of shape %s.",
                    counterexample, result_shape)

    return ProductRuleResult(
        holds=not bad.size and (len(odd) == 1 or exceeds),
        shape=result_shape,
        nfactors=len(odd),
        exceeds_index=exceeds,
        counterexample=counterexample,
    )


def count_products(n: int, shape: ShapeVector, v: int) -> int:
    """Number of *v*-subsets of :math:`\\mathbb{H}^2_n` whose product is an
    :math:`\\mathsf{r}` function of the given *shape*, i.e.
    :math:`\\binom{|\\vec s| - n - 1}{v - 2}`.
    """
    from scipy.special import comb

    if shape.dim != 2:
        raise ValueError(f"Products are only counted in dimension 2: '{shape}'")

    if not 2 <= v <= n:
        raise ValueError(f"Subset size must be in [2, {n}]: '{v}'")

    if shape.index < n + v - 1:
        raise ValueError(
            f"Shape {shape} has index {shape.index} < n + v - 1 = {n + v - 1}"
        )

    if any(s > n - 1 for s in shape.components):
        raise ValueError(f"Shape components must be at most {n - 1}: '{shape}'")

    return int(comb(shape.index - n - 1, v - 2, exact=True))


def count_products_brute(n: int, shape: ShapeVector, v: int) -> int:
    """Count the subsets of :func:`count_products` by enumeration.

    A subset of :math:`\\mathbb{H}^2_n` is determined by its first coordinates
    :math:`a_1 < \\cdots < a_v` and its product has shape
    :math:`(\\max a, n - \\min a)`.
    """
    target = shape.components
    return sum(
        1
        for firsts in itertools.combinations(range(1, n), v)
        if (firsts[-1], n - firsts[0]) == target
    )


# }}}


# {{{ moments


def gamma_prime(m: int, h: int) -> int:
    """The moment :math:`\\mathbb{E}(\\varepsilon_1 + \\cdots + \\varepsilon_h)^m`
    of a sum of *h* independent random signs, for even *m*.
    """
    from scipy.special import comb

    if m < 0 or m % 2:
        raise ValueError(f"Moment order must be even and non-negative: '{m}'")

    if h < 1:
        raise ValueError(f"Number of signs must be positive: '{h}'")

    total = sum(int(comb(h, j, exact=True)) * (h - 2 * j) ** m for j in range(h + 1))
    assert total % (1 << h) == 0

    return total >> h


def gamma_prime_enumeration(m: int, h: int) -> int:
    """Compute :func:`gamma_prime` by summing over all :math:`2^h` sign patterns."""
    from dyadic_discrepancy.config import GAMMA_ENUMERATION_MAX_H

    _check_guard("Sign enumeration", h, GAMMA_ENUMERATION_MAX_H)

    patterns = np.arange(1 << h, dtype=np.int64)[:, None]
    bits = (patterns >> np.arange(h, dtype=np.int64)) & 1
    sums = np.sum(1 - 2 * bits, axis=1)

    total = int(np.sum(sums**m))
    assert total % (1 << h) == 0

    return total >> h


def gamma_prime_grid(n: int, m: int) -> int:
    """Compute :math:`\\int (\\sum_{\\vec r \\in \\mathbb{H}^2_n} \\varphi_{\\vec r})^m`
    on the grid, where :math:`\\varphi_{\\vec r}` has all signs positive.
    """
    shapes = enumerate_shapes(n, 2)
    total = hyperbolic_sum([SignedRFunction.constant(s) for s in shapes], (n, n))

    moment = int(np.sum(total.astype(np.int64) ** m))
    assert moment % total.size == 0

    return moment // total.size


# }}}


# {{{ expansion


def expand_hyperbolic_power(h: int, k: int) -> dict[int, int]:
    """Expand :math:`(f_1 + \\cdots + f_h)^k` using :math:`f_i^2 = 1`.

    Every monomial reduces to the product over its odd-multiplicity factors,
    which is encoded as a bitmask.

    :returns: a mapping from bitmasks to the number of monomials reducing to it.
    """
    counts: dict[int, int] = {0: 1}
    for _ in range(k):
        result: dict[int, int] = {}
        for mask, c in counts.items():
            for i in range(h):
                key = mask ^ (1 << i)
                result[key] = result.get(key, 0) + c
        counts = result

    return counts


def expansion_counts(h: int, kmax: int) -> list[list[int]]:
    """Table of :math:`c_k(v)` for :math:`0 \\le k \\le k_{max}` and
    :math:`0 \\le v \\le h`.

    By symmetry the number of monomials of :math:`(f_1 + \\cdots + f_h)^k` that
    reduce to a fixed subset only depends on its size *v*, so that
    :math:`c_{k + 1}(v) = v c_k(v - 1) + (h - v) c_k(v + 1)`.
    """
    table = [[0] * (h + 1) for _ in range(kmax + 1)]
    table[0][0] = 1
    for k in range(kmax):
        prev, cur = table[k], table[k + 1]
        for v in range(h + 1):
            below = v * prev[v - 1] if v >= 1 else 0
            above = (h - v) * prev[v + 1] if v < h else 0
            cur[v] = below + above

    return table


@dataclass(frozen=True)
class ExpansionCoefficients:
    """The expansion :math:`(\\sum_{\\vec r} f_{\\vec r})^k = \\sum_v c(v) G_v`
    over :math:`\\mathbb{H}^2_n`.
    """

    k: int
    n: int
    coefficients: dict[int, int]
    """The exact counts :math:`c(v)`, for odd :math:`v \\le \\min(k, n - 1)`."""
    gamma: dict[int, float]
    """Normalized values :math:`\\gamma = c(v) n^{-(k - v) / 2}`."""
    uniform: bool
    """All subsets of the same size have the same count."""
    odd_only: bool
    """Only subsets of odd size survive."""
    leading_factorial: bool
    """The top coefficient is :math:`c(k) = k!` (when :math:`k \\le n - 1`)."""
    closed_form_k3: bool | None
    """For :math:`k = 3`, whether :math:`c(1) = 3 (n - 1) - 2`."""
    c0_measured: float
    """The smallest :math:`C_0` for which
    :math:`\\gamma \\le k! / (k - v)! \\, [C_0 (k - v)]^{(k - v)/2}` holds."""

    @property
    def passed(self) -> bool:
        return (
            self.uniform
            and self.odd_only
            and self.leading_factorial
            and self.closed_form_k3 is not False
        )


def verify_Gv_expansion(n: int, k: int) -> ExpansionCoefficients:
    from scipy.special import comb

    from dyadic_discrepancy.config import EXPANSION_MAX_K, EXPANSION_MAX_N

    if k < 1 or k % 2 == 0:
        raise ValueError(f"Power must be a positive odd integer: '{k}'")

    if n < 2:
        raise ValueError(f"Index must be at least 2: '{n}'")

    _check_guard("Symbolic expansion index", n, EXPANSION_MAX_N)
    _check_guard("Symbolic expansion power", k, EXPANSION_MAX_K)

    h = n - 1
    counts = expand_hyperbolic_power(h, k)

    by_size: dict[int, set[int]] = {}
    nmasks: dict[int, int] = {}
    for mask, c in counts.items():
        if c == 0:
            continue
        v = mask.bit_count()
        by_size.setdefault(v, set()).add(c)
        nmasks[v] = nmasks.get(v, 0) + 1

    uniform = all(
        len(values) == 1 and nmasks[v] == int(comb(h, v, exact=True))
        for v, values in by_size.items()
    )
    odd_only = all(v % 2 == 1 for v in by_size)
    coefficients = {v: next(iter(by_size[v])) for v in sorted(by_size)}

    gamma = {v: c / n ** ((k - v) / 2) for v, c in coefficients.items()}
    c0 = max(
        (
            (gamma[v] * math.factorial(k - v) / math.factorial(k)) ** (2 / (k - v))
            / (k - v)
            for v in coefficients
            if v < k
        ),
        default=0.0,
    )

    result = ExpansionCoefficients(
        k=k,
        n=n,
        coefficients=coefficients,
        gamma=gamma,
        uniform=uniform,
        odd_only=odd_only,
        leading_factorial=k > h or coefficients.get(k) == math.factorial(k),
        closed_form_k3=(coefficients.get(1) == 3 * h - 2) if k == 3 else None,
        c0_measured=c0,
    )

    log.debug("Expansion of power %d for n = %d: %s", k, n, coefficients)
    return result


def sine_weights(n: int, epsilon: float, kmax: int | None = None) -> dict[int, float]:
    """Weights :math:`\\delta(v)` with

    .. math::

        \\sin\\left(\\epsilon n^{-1/2} \\sum_{\\vec r} f_{\\vec r}\\right)
        = \\sum_{v\\ \\mathrm{odd}} \\delta(v) n^{-v/2} G_v,

    from the odd sine series truncated at power *kmax*.
    """
    from dyadic_discrepancy.config import SINE_SERIES_ORDER

    if kmax is None:
        kmax = SINE_SERIES_ORDER

    h = n - 1
    table = expansion_counts(h, kmax)

    weights: dict[int, float] = {}
    for v in range(1, h + 1, 2):
        terms = [
            (-1) ** ((k - 1) // 2)
            * epsilon**k
            * n ** (-(k - v) / 2)
            * (table[k][v] / math.factorial(k))
            for k in range(v, kmax + 1, 2)
        ]
        weights[v] = math.fsum(terms)

    return weights


def tail_bound(npoints: int, n: int, v: int) -> float:
    """Upper bound on :math:`|\\langle D_N, G_v \\rangle|` for :math:`v \\ge 2`.

    Each product of *v* distinct planar :math:`\\mathsf{r}` functions has a shape
    :math:`\\vec s` of index :math:`n + v - 1 \\le |\\vec s| \\le 2n - 2`, and
    pairs with :math:`D_N` to at most :math:`N 2^{-|\\vec s|}`.
    """
    from scipy.special import comb

    if v < 2:
        raise ValueError(f"Tail bounds need at least two factors: '{v}'")

    terms = [
        math.ldexp(1.0, -index)
        * int(comb(index - n - 1, v - 2, exact=True))
        * (2 * n - 1 - index)
        for index in range(n + v - 1, 2 * n - 1)
    ]

    return npoints * math.fsum(terms)


# }}}


# {{{ certificates


@dataclass(frozen=True)
class PairingReport:
    """Lower-bound certificate from the pairing of :math:`D_N` with a test function."""

    name: str
    d: int
    n: int
    npoints: int
    epsilon: float
    resolution: tuple[int, ...]
    pairing: float
    """The pairing with the test function."""
    sup_norm: float
    """:math:`\\|\\cdot\\|_\\infty` of the test function."""
    implied_l1_bound: float
    """Lower bound on :math:`\\|D_N\\|_1` given by the pairing over the sup norm."""
    leading_term: float | None = None
    """The term :math:`\\delta(1) n^{-1/2} \\langle D_N, G_1 \\rangle` (planar only)."""
    leading_floor: float | None = None
    """Provable lower bound on the leading term."""
    per_prefix: dict[str, float] = field(default_factory=dict)
    """Pairings :math:`\\langle D_N, \\sin(\\epsilon n^{-1/2} F_{\\vec s}) \\rangle`."""
    per_prefix_sup: float | None = None
    linearity_residual: float | None = None
    """Difference between the direct pairing and the sum over the prefixes."""
    orlicz_norm: float | None = None
    """Norm of the test function in :math:`\\exp(L^{2/(d - 1)})`."""
    quotient_bound: float | None = None
    """Lower bound (up to the duality constant) on
    :math:`\\|D_N\\|_{L (\\log L)^{(d - 2)/2}}`."""

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def leading_term(
    pointset: PointSet, cfg: CertificateConfig
) -> tuple[float, float]:
    """Leading term of the planar expansion and its provable lower bound."""
    _check_planar(pointset, "The leading term")

    shapes = enumerate_shapes(cfg.n, 2)
    g1 = math.fsum(
        pair_DN_rfunction(pointset, build_rfunction(pointset, shape))
        for shape in shapes
    )

    delta1 = sine_weights(cfg.n, cfg.epsilon)[1]
    value = delta1 * g1 / math.sqrt(cfg.n)
    floor = delta1 * len(shapes) * rvec_floor(2) / math.sqrt(cfg.n)

    return value, floor


def _halasz_report(
    pointset: PointSet, cfg: CertificateConfig, psi: GridFunction
) -> PairingReport:
    with timeit("Pairing with Psi"):
        pairing = pair_DN_grid(pointset, psi)

    sup_norm = float(np.max(np.abs(psi.values)))
    leading, floor = leading_term(pointset, cfg)

    return PairingReport(
        name="halasz",
        d=2,
        n=cfg.n,
        npoints=pointset.npoints,
        epsilon=cfg.epsilon,
        resolution=psi.resolution,
        pairing=pairing,
        sup_norm=sup_norm,
        implied_l1_bound=pairing / sup_norm if sup_norm > 0 else 0.0,
        leading_term=leading,
        leading_floor=floor,
    )


def halasz_certificate(pointset: PointSet, cfg: CertificateConfig) -> PairingReport:
    _check_planar(pointset, "The planar certificate")
    return _halasz_report(pointset, cfg, build_Psi(pointset, cfg))


def prefix_pairings(
    pointset: PointSet, cfg: CertificateConfig
) -> tuple[dict[tuple[int, ...], float], float]:
    """Pairings of :math:`D_N` with each :math:`\\sin(\\epsilon n^{-1/2} F_{\\vec s})`,
    each computed at the resolution of its own :math:`F_{\\vec s}`, and the
    largest sup norm among these functions.
    """
    pairings: dict[tuple[int, ...], float] = {}
    sup = 0.0
    for prefix in prefix_vectors(cfg.n, pointset.dim, cfg.s_cap):
        fs = build_Fs(pointset, prefix, cfg)
        term = grid_map(fs, lambda x: np.sin(cfg.scale * x))

        pairings[prefix] = pair_DN_grid(pointset, term)
        sup = max(sup, float(np.max(np.abs(term.values))))
        log.debug("Prefix %s: pairing %.6e", prefix, pairings[prefix])

    return pairings, sup


def main_certificate(pointset: PointSet, cfg: CertificateConfig) -> PairingReport:
    """Certificate for :math:`\\|D_N\\|_{L (\\log L)^{(d - 2)/2}}` from
    :math:`\\Phi`.
    """
    from dyadic_discrepancy.norms import OrliczGauge, orlicz_norm

    d = pointset.dim
    if d == 2:
        psi = build_Psi(pointset, cfg)
        report = _halasz_report(pointset, cfg, psi)
        norm = orlicz_norm(psi, OrliczGauge("exp", 2.0)).value

        return replace(
            report,
            name="main",
            orlicz_norm=norm,
            quotient_bound=report.pairing / norm if norm > 0 else 0.0,
        )

    if d < 2:
        raise ValueError(f"The certificate needs dimension at least 2: got '{d}'")

    with timeit(f"Prefix pairings for n = {cfg.n}"):
        pairings, per_prefix_sup = prefix_pairings(pointset, cfg)
    pairing = cfg.n ** (-(d - 2) / 2) * pairwise_sum(list(pairings.values()))

    phi = build_Phi(pointset, cfg)
    with timeit("Pairing with Phi"):
        direct = pair_DN_grid(pointset, phi)

    sup_norm = float(np.max(np.abs(phi.values)))
    norm = orlicz_norm(phi, OrliczGauge("exp", 2.0 / (d - 1))).value

    return PairingReport(
        name="main",
        d=d,
        n=cfg.n,
        npoints=pointset.npoints,
        epsilon=cfg.epsilon,
        resolution=phi.resolution,
        pairing=pairing,
        sup_norm=sup_norm,
        implied_l1_bound=pairing / sup_norm if sup_norm > 0 else 0.0,
        per_prefix={",".join(str(s) for s in k): v for k, v in pairings.items()},
        per_prefix_sup=per_prefix_sup,
        linearity_residual=abs(direct - pairing),
        orlicz_norm=norm,
        quotient_bound=pairing / norm if norm > 0 else 0.0,
    )


@dataclass(frozen=True)
class HalaszExpansion:
    """The decomposition
    :math:`\\langle D_N, \\Psi \\rangle
    = \\sum_v \\delta(v) n^{-v/2} \\langle D_N, G_v \\rangle`.
    """

    weights: dict[int, float]
    """The weights :math:`\\delta(v)`."""
    pairings: dict[int, float]
    """The pairings :math:`\\langle D_N, G_v \\rangle`."""
    tail_bounds: dict[int, float]
    """Bounds from :func:`tail_bound` for :math:`v \\ge 3`."""
    total: float
    """Sum of the expansion."""
    direct: float
    """The pairing :math:`\\langle D_N, \\Psi \\rangle` computed on the grid."""

    @property
    def residual(self) -> float:
        return abs(self.total - self.direct)


def halasz_expansion(pointset: PointSet, cfg: CertificateConfig) -> HalaszExpansion:
    """Realize the expansion of :math:`\\Psi` in the :math:`G_v` numerically."""
    from scipy.special import comb

    from dyadic_discrepancy import config
    from dyadic_discrepancy.config import EXPANSION_MAX_N

    _check_planar(pointset, "The expansion")
    _check_guard("Expansion index", cfg.n, EXPANSION_MAX_N)

    h = cfg.n - 1
    guard = config.getint("gv-max-subsets")
    for v in range(1, h + 1, 2):
        _check_guard(f"G_{v}", int(comb(h, v, exact=True)), guard)

    sums = subset_product_sums(planar_factors(pointset, cfg), h)
    weights = sine_weights(cfg.n, cfg.epsilon)

    pairings = {
        v: pair_DN_grid(pointset, GridFunction(sums[v])) for v in weights
    }
    terms = [weights[v] * cfg.n ** (-v / 2) * pairings[v] for v in weights]

    return HalaszExpansion(
        weights=weights,
        pairings=pairings,
        tail_bounds={
            v: tail_bound(pointset.npoints, cfg.n, v) for v in weights if v >= 3
        },
        total=math.fsum(terms),
        direct=pair_DN_grid(pointset, build_Psi(pointset, cfg)),
    )


def epsilon_sweep(
    pointset: PointSet, epsilons: Sequence[float], n: int | None = None
) -> list[tuple[float, float]]:
    """Pairings of :math:`D_N` with the test function over a range of
    :math:`\\epsilon`, to exhibit where they stay positive.
    """
    if n is None:
        n = hyperbolic_index(pointset.npoints)

    results = []
    if pointset.dim == 2:
        shapes = enumerate_shapes(n, 2)
        total = hyperbolic_sum(build_rfunctions(pointset, shapes), (n, n))
        for epsilon in epsilons:
            cfg = CertificateConfig(n=n, epsilon=epsilon)
            psi = GridFunction(np.sin(cfg.scale * total))
            results.append((epsilon, pair_DN_grid(pointset, psi)))
    else:
        for epsilon in epsilons:
            cfg = CertificateConfig(n=n, epsilon=epsilon)
            pairings, _ = prefix_pairings(pointset, cfg)
            value = pairwise_sum(list(pairings.values()))
            results.append((epsilon, n ** (-(pointset.dim - 2) / 2) * value))

    return results


# }}}
