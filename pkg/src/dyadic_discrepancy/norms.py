# SPDX-FileCopyrightText: 2024 dyadic-discrepancy developers
# SPDX-License-Identifier: MIT

"""Lebesgue and Orlicz norms of grid functions and exact checks of the
moment inequalities for Rademacher sums.

The Orlicz (Luxemburg) norm for a gauge :math:`\\psi` is

.. math::

    \\|f\\|_{L^\\psi} = \\inf \\{K > 0 : \\mathbb{E} \\psi(f / K) \\le 1\\},

computed by bisection on :math:`K`. Two families of gauges are supported:
:math:`\\exp(L^\\alpha)` with :math:`\\psi(x) = e^{|x|^\\alpha} - 1` for large
:math:`|x|`, and :math:`L (\\log L)^\\alpha` with
:math:`\\psi(x) = |x| \\log(3 + |x|)^\\alpha`.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import asdict, dataclass, field
from typing import Any, Literal

import numpy as np
import numpy.typing as npt

from dyadic_discrepancy.config import (
    ORLICZ_RTOL,
    PNORM_EXPONENTS,
    RADEMACHER_MAX_TERMS,
    REFINEMENT_TOLERANCE,
)
from dyadic_discrepancy.dyadic import (
    GridFunction,
    ResolutionError,
    check_resolution,
    grid_inner,
    grid_pnorm,
)
from dyadic_discrepancy.logging import get_logger
from dyadic_discrepancy.pointset import PointSet
from dyadic_discrepancy.utils import pairwise_sum, relative_difference

log = get_logger(__name__)

GaugeKind = Literal["exp", "llog"]


# {{{ gauges


def _exp_tangent_point(alpha: float) -> float:
    """Point :math:`t_1` where the tangent to :math:`e^{t^\\alpha} - 1` passes
    through the origin, for :math:`0 < \\alpha < 1`.

    With :math:`u = t_1^\\alpha`, the tangency condition reads
    :math:`e^u (1 - \\alpha u) = 1`, whose positive root lies between the
    inflection point :math:`(1 - \\alpha) / \\alpha` and :math:`1 / \\alpha`.
    """
    from scipy.optimize import brentq

    def tangency(u: float) -> float:
        return math.exp(u) * (1.0 - alpha * u) - 1.0

    u = brentq(tangency, (1.0 - alpha) / alpha, 1.0 / alpha, xtol=1.0e-15)
    return float(u ** (1.0 / alpha))


@dataclass(frozen=True)
class OrliczGauge:
    """A symmetric convex gauge :math:`\\psi` that vanishes only at the origin."""

    kind: GaugeKind
    """Either ``"exp"`` for :math:`\\exp(L^\\alpha)` or ``"llog"`` for
    :math:`L (\\log L)^\\alpha`."""
    alpha: float
    splice: float = field(init=False)
    """Point below which the gauge is replaced by its linear minorant. For
    :math:`\\exp(L^\\alpha)` with :math:`\\alpha < 1`, the function
    :math:`e^{|x|^\\alpha} - 1` is not convex near the origin and is replaced by
    its tangent through the origin on :math:`[0, t_1]`. Zero otherwise."""

    def __post_init__(self) -> None:
        if self.kind == "exp":
            if not self.alpha > 0:
                raise ValueError(f"Exponent must be positive: '{self.alpha}'")
            splice = 0.0 if self.alpha >= 1 else _exp_tangent_point(self.alpha)
        elif self.kind == "llog":
            if not self.alpha >= 0:
                raise ValueError(f"Exponent must be non-negative: '{self.alpha}'")
            splice = 0.0
        else:
            raise ValueError(
                f"Unknown gauge kind '{self.kind}'. Known kinds are 'exp, llog'"
            )

        object.__setattr__(self, "splice", splice)

    @property
    def name(self) -> str:
        if self.kind == "exp":
            return f"exp(L^{self.alpha:g})"
        else:
            return f"L(log L)^{self.alpha:g}"

    def __call__(self, x: npt.ArrayLike) -> npt.NDArray[np.float64]:
        a = np.abs(np.asarray(x, dtype=np.float64))

        with np.errstate(over="ignore"):
            if self.kind == "llog":
                return a * np.log(3.0 + a) ** self.alpha

            result = np.expm1(a**self.alpha)
            if self.splice > 0:
                slope = math.expm1(self.splice**self.alpha) / self.splice
                result = np.where(a < self.splice, slope * a, result)

        return np.asarray(result, dtype=np.float64)


# }}}


# {{{ norm reports


@dataclass(frozen=True)
class NormReport:
    value: float
    norm: str
    """Name of the norm, e.g. ``"L^2"`` or ``"exp(L^2)"``."""
    method: str
    """One of ``"bisection"``, ``"p-sup"`` or ``"exact"``."""
    residual: float | None = None
    """The value :math:`\\mathbb{E} \\psi(f / K) - 1` at the returned norm."""
    iterations: int | None = None
    meta: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def luxemburg_norm(
    values: npt.ArrayLike,
    gauge: OrliczGauge,
    weights: npt.ArrayLike | None = None,
) -> NormReport:
    """Orlicz norm of a discrete random variable.

    :arg values: values of the function.
    :arg weights: probabilities of the values. If *None*, all values are
        equally likely (as for the cells of a grid).
    """
    from scipy.optimize import bisect

    x = np.abs(np.asarray(values, dtype=np.float64)).ravel()
    if weights is None:
        w = None
    else:
        w = np.asarray(weights, dtype=np.float64).ravel()
        if w.shape != x.shape:
            raise ValueError(f"Got {x.size} values but {w.size} weights")

    amax = float(np.max(x)) if x.size else 0.0
    if amax == 0.0:
        return NormReport(0.0, gauge.name, "bisection", residual=None, iterations=0)

    def excess(k: float) -> float:
        psi = gauge(x / k)
        mean = pairwise_sum(psi) / x.size if w is None else pairwise_sum(psi * w)
        return mean - 1.0

    hi = amax
    while excess(hi) > 0:
        hi *= 2.0
    lo = hi
    while excess(lo) <= 0:
        lo /= 2.0

    k, result = bisect(
        excess, lo, hi, xtol=ORLICZ_RTOL * lo, rtol=ORLICZ_RTOL, full_output=True
    )

    return NormReport(
        value=float(k),
        norm=gauge.name,
        method="bisection",
        residual=excess(k),
        iterations=int(result.iterations),
    )


def orlicz_norm(g: GridFunction, gauge: OrliczGauge) -> NormReport:
    """Orlicz norm of a grid function with respect to Lebesgue measure."""
    report = luxemburg_norm(g.values, gauge)
    return NormReport(
        value=report.value,
        norm=report.norm,
        method=report.method,
        residual=report.residual,
        iterations=report.iterations,
        meta={"resolution": g.resolution},
    )


def pnorm_report(g: GridFunction, p: float) -> NormReport:
    return NormReport(
        grid_pnorm(g, p), f"L^{p:g}", "exact", meta={"resolution": g.resolution}
    )


def exp_orlicz_via_pnorms(
    g: GridFunction,
    alpha: float,
    ps: Sequence[float] = PNORM_EXPONENTS,
) -> float:
    """Compute :math:`\\max_p p^{-1/\\alpha} \\|g\\|_p` over the exponents *ps*,
    which is equivalent to the :math:`\\exp(L^\\alpha)` norm.
    """
    if not alpha > 0:
        raise ValueError(f"Exponent must be positive: '{alpha}'")

    return max(p ** (-1.0 / alpha) * grid_pnorm(g, p) for p in ps)


# }}}


# {{{ duality


@dataclass(frozen=True)
class DualPairingReport:
    inner: float
    """The pairing :math:`\\langle f, g \\rangle`."""
    f_norm: float
    """Norm of *f* in :math:`L (\\log L)^\\alpha`."""
    g_norm: float
    """Norm of *g* in :math:`\\exp(L^{1/\\alpha})`."""
    ratio: float | None
    """:math:`|\\langle f, g \\rangle| / (\\|f\\| \\|g\\|)`, or *None* if a norm
    vanishes and the check is skipped."""


def dual_pairing_check(
    f: GridFunction, g: GridFunction, alpha: float
) -> DualPairingReport:
    """Empirical Hölder inequality between :math:`L (\\log L)^\\alpha` and
    :math:`\\exp(L^{1/\\alpha})`.
    """
    if not alpha > 0:
        raise ValueError(f"Exponent must be positive: '{alpha}'")

    inner = grid_inner(f, g)
    f_norm = orlicz_norm(f, OrliczGauge("llog", alpha)).value
    g_norm = orlicz_norm(g, OrliczGauge("exp", 1.0 / alpha)).value

    ratio = None
    if f_norm > 0 and g_norm > 0:
        ratio = abs(inner) / (f_norm * g_norm)

    return DualPairingReport(inner=inner, f_norm=f_norm, g_norm=g_norm, ratio=ratio)


# }}}


# {{{ rademacher sums


def rademacher_sums(c: Sequence[float]) -> npt.NDArray[np.float64]:
    """All :math:`2^{|c|}` values of :math:`\\sum_j c_j r_j`, one per sign pattern."""
    if len(c) > RADEMACHER_MAX_TERMS:
        raise ValueError(
            f"Exact enumeration supports at most {RADEMACHER_MAX_TERMS} "
            f"coefficients: got {len(c)}"
        )

    sums = np.zeros(1, dtype=np.float64)
    for cj in c:
        sums = np.concatenate([sums + cj, sums - cj])

    return sums


@dataclass(frozen=True)
class RademacherReport:
    l2_norm: float
    """The coefficient norm :math:`(\\sum_j c_j^2)^{1/2}`."""
    mgf: float
    """The moment generating function
    :math:`\\mathbb{E} \\exp(\\lambda \\sum_j c_j r_j)`."""
    mgf_bound: float
    """The bound :math:`\\exp(\\lambda^2 \\sum_j c_j^2 / 2)`."""
    mgf_holds: bool
    """Strict inequality (equality only in the degenerate cases)."""
    pnorm: float
    """:math:`\\|\\sum_j c_j r_j\\|_p`."""
    khintchine_bound: float
    """:math:`\\sqrt{p} (\\sum_j c_j^2)^{1/2}`."""
    khintchine_holds: bool
    exp_l2_norm: float
    """:math:`\\|\\sum_j c_j r_j\\|_{\\exp(L^2)}`."""
    exp_l2_bound: float
    exp_l2_holds: bool

    @property
    def passed(self) -> bool:
        return self.mgf_holds and self.khintchine_holds and self.exp_l2_holds


def rademacher_checks(c: Sequence[float], lam: float, p: float) -> RademacherReport:
    """Exact checks of the moment inequalities for :math:`\\sum_j c_j r_j`."""
    if not p >= 1:
        raise ValueError(f"Exponent must be at least 1: '{p}'")

    sums = rademacher_sums(c)
    l2 = math.sqrt(math.fsum(cj * cj for cj in c))

    mgf = pairwise_sum(np.exp(lam * sums)) / sums.size
    mgf_bound = math.exp(lam * lam * l2 * l2 / 2)
    degenerate = lam == 0 or l2 == 0
    mgf_holds = mgf <= mgf_bound if degenerate else mgf < mgf_bound

    pnorm = (pairwise_sum(np.abs(sums) ** p) / sums.size) ** (1.0 / p)
    khintchine_bound = math.sqrt(p) * l2

    exp_l2 = luxemburg_norm(sums, OrliczGauge("exp", 2.0)).value

    return RademacherReport(
        l2_norm=l2,
        mgf=mgf,
        mgf_bound=mgf_bound,
        mgf_holds=bool(mgf_holds),
        pnorm=pnorm,
        khintchine_bound=khintchine_bound,
        khintchine_holds=pnorm <= khintchine_bound * (1 + 1.0e-12),
        exp_l2_norm=exp_l2,
        exp_l2_bound=3.0 * l2,
        exp_l2_holds=exp_l2 <= 3.0 * l2 * (1 + 1.0e-12),
    )


# }}}


# {{{ discrepancy norms


def _dn_norms(
    dn: GridFunction, alpha: float
) -> dict[str, Callable[[], NormReport]]:
    return {
        "l1": lambda: pnorm_report(dn, 1),
        "l2": lambda: pnorm_report(dn, 2),
        "l1logl": lambda: orlicz_norm(dn, OrliczGauge("llog", alpha)),
    }


def dn_norm_suite(pointset: PointSet, resolution: Sequence[int]) -> list[NormReport]:
    """Norms :math:`\\|D_N\\|_1`, :math:`\\|D_N\\|_2` and
    :math:`\\|D_N\\|_{L (\\log L)^{(d - 2)/2}}` of the cell averages of
    :math:`D_N` at the given *resolution*.

    Each report records the value at the next finer resolution (when it fits
    under the grid cap) and whether the relative change is below
    :data:`~dyadic_discrepancy.config.REFINEMENT_TOLERANCE`.
    """
    from dyadic_discrepancy.discrepancy import cell_average_DN

    resolution = check_resolution(resolution)
    alpha = (pointset.dim - 2) / 2

    dn = cell_average_DN(pointset, resolution)
    try:
        finer_resolution = check_resolution([m + 1 for m in resolution])
        finer: GridFunction | None = cell_average_DN(pointset, finer_resolution)
    except ResolutionError:
        log.warning("Cannot refine %s for the convergence check.", resolution)
        finer = None

    reports = []
    coarse_norms = _dn_norms(dn, alpha)
    fine_norms = _dn_norms(finer, alpha) if finer is not None else {}
    for name, compute in coarse_norms.items():
        report = compute()

        meta: dict[str, Any] = {"metric": name, "resolution": resolution}
        if name in fine_norms:
            refined = fine_norms[name]().value
            change = relative_difference(report.value, refined)
            meta.update({
                "refined": refined,
                "relative_change": change,
                "converged": change < REFINEMENT_TOLERANCE,
            })

        reports.append(NormReport(
            value=report.value,
            norm=report.norm,
            method=report.method,
            residual=report.residual,
            iterations=report.iterations,
            meta=meta,
        ))

    return reports


def empirical_pnorms(
    pointset: PointSet,
    resolution: Sequence[int],
    ps: Sequence[float] = (0.25, 0.5, 0.75),
) -> dict[float, float]:
    """Quasi-norms :math:`\\|D_N\\|_p` for :math:`0 < p < 1` (reported only)."""
    from dyadic_discrepancy.discrepancy import cell_average_DN

    dn = cell_average_DN(pointset, resolution)
    return {p: grid_pnorm(dn, p) for p in ps}


# }}}
