# SPDX-FileCopyrightText: 2024 dyadic-discrepancy developers
# SPDX-License-Identifier: MIT

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import Any

import click

from dyadic_discrepancy import __version__, config
from dyadic_discrepancy.config import DERIVED_CONSTANTS
from dyadic_discrepancy.logging import get_logger, set_log_level
from dyadic_discrepancy.pointset import FAMILIES, PointSet
from dyadic_discrepancy.utils import dump_json, timeit

log = get_logger(__name__)

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")
SWEEP_METRICS = ("l1", "l2", "l1logl", "pairing_psi", "pairing_phi", "hardy_sq_p")
SWEEP_HEADER = ("family", "d", "n", "N", "metric", "value", "bound", "ms")

# {{{ utils


def make_report(
    ctx: click.Context,
    checks: Sequence[Any] = (),
    *,
    timing: dict[str, float] | None = None,
    **kwargs: Any,
) -> dict[str, Any]:
    """Assemble the JSON report shared by all subcommands.

    Every report echoes the command options, the library version and the
    ledger of derived constants used by the checks.
    """
    assert ctx.command.name is not None
    return {
        "config": {"command": ctx.command.name, **ctx.params},
        "version": __version__,
        "constants": DERIVED_CONSTANTS,
        "checks": [check.to_dict() for check in checks],
        "timing": timing,
        **kwargs,
    }


def write_output(text: str, outfile: str | None) -> None:
    if not text.endswith("\n"):
        text = f"{text}\n"

    if outfile is None:
        click.echo(text, nl=False)
        return

    with open(outfile, "w", encoding="utf-8") as outf:
        outf.write(text)

    log.info("Output saved in '%s'.", outfile)


def exit_with_checks(ctx: click.Context, checks: Sequence[Any]) -> None:
    """Exit with code 1 if any check failed (skipped checks do not count)."""
    from dyadic_discrepancy.verify import summarize

    passed, failed, skipped = summarize(checks)
    log.info("Checks: %d passed, %d failed, %d skipped.", passed, failed, skipped)

    if failed:
        for check in checks:
            if check.passed is False:
                log.error("Check '%s' failed: measured %s against bound %s.",
                          check.name, check.measured, check.bound)
        ctx.exit(1)


def get_pointset(
    points: str | None,
    family: str,
    npoints: int | None,
    m: int | None,
    dim: int,
    seed: int,
) -> PointSet:
    """Load the point set from *points* or generate one from a family."""
    from dyadic_discrepancy.pointset import generate, load_points

    try:
        if points is not None:
            return load_points(points)

        if m is not None:
            if npoints is not None:
                raise ValueError("Options '--m' and '--npoints' are exclusive")
            if m < 0:
                raise ValueError(f"Exponent '--m' must be non-negative: '{m}'")
            npoints = 1 << m

        if npoints is None:
            raise ValueError("One of '--points', '--m' or '--npoints' is required")

        if dim < 1:
            raise ValueError(f"Dimension must be at least 1: '{dim}'")

        return generate(family, npoints, dim, seed=seed)
    except (OSError, ValueError) as exc:
        raise click.UsageError(str(exc)) from exc


def pointset_options(func: Callable[..., Any]) -> Callable[..., Any]:
    """Options shared by the commands that work on a single point set."""
    options = [
        click.option(
            "--points",
            type=click.Path(exists=True, dir_okay=False),
            default=None,
            help="Points file to read instead of generating a point set",
        ),
        click.option(
            "-f",
            "--family",
            type=click.Choice(FAMILIES, case_sensitive=False),
            default="vdc",
            show_default=True,
            help="Point set family",
        ),
        click.option(
            "-N",
            "--npoints",
            type=int,
            default=None,
            help="Number of points",
        ),
        click.option(
            "-m",
            "--m",
            "m",
            type=int,
            default=None,
            help="Generate N = 2^m points",
        ),
        click.option(
            "-d",
            "--dim",
            type=int,
            default=2,
            show_default=True,
            help="Dimension of the point set",
        ),
        click.option(
            "--seed",
            type=int,
            default=0,
            show_default=True,
            help="Seed for random point sets",
        ),
    ]

    for option in reversed(options):
        func = option(func)

    return func


def output_options(func: Callable[..., Any]) -> Callable[..., Any]:
    func = click.option(
        "--timing",
        flag_value=True,
        default=False,
        is_flag=True,
        help="Record wall times in the report (outputs are then not reproducible)",
    )(func)
    return click.option(
        "-o",
        "--out",
        type=click.Path(dir_okay=False),
        default=None,
        help="Output file (standard output by default)",
    )(func)


def check_epsilon(epsilon: float | None) -> float:
    if epsilon is None:
        epsilon = config.getfloat("epsilon")

    if not 0.0 < epsilon < 1.0:
        raise click.UsageError(f"Epsilon must be in (0, 1): '{epsilon}'")

    return epsilon


# }}}


# {{{ command


@click.group("dyadic-discrepancy")
@click.help_option("--help", "-h")
@click.version_option(__version__, "--version")
@click.option(
    "-l",
    "--log-level",
    type=click.Choice(LOG_LEVELS, case_sensitive=False),
    default=None,
    help="Logging level (defaults to the 'log-level' setting)",
)
def cli(log_level: str | None) -> None:
    """Compute and verify lower bounds for the discrepancy function"""
    if log_level is None:
        log_level = config.get("log-level")

    set_log_level(log_level)


# }}}


# {{{ gen


@cli.command("gen")
@click.help_option("--help", "-h")
@pointset_options
@click.option(
    "-o",
    "--out",
    type=click.Path(dir_okay=False),
    default=None,
    help="Points file to write (standard output by default)",
)
def cli_gen(
    points: str | None,
    family: str,
    npoints: int | None,
    m: int | None,
    dim: int,
    seed: int,
    out: str | None,
) -> None:
    """Generate a point set and write it as a points file"""
    from dyadic_discrepancy.pointset import format_points

    pointset = get_pointset(points, family, npoints, m, dim, seed)
    write_output(format_points(pointset), out)


# }}}


# {{{ pair


@cli.command("pair")
@click.help_option("--help", "-h")
@pointset_options
@click.option(
    "-e",
    "--epsilon",
    type=float,
    default=None,
    help="Constant inside the sines (defaults to the 'epsilon' setting)",
)
@click.option(
    "-n",
    "--index",
    type=int,
    default=None,
    help="Index of the hyperbolic family (by default the smallest n with 2N <= 2^n)",
)
@click.option(
    "--certificate",
    type=click.Choice(["halasz", "main"], case_sensitive=False),
    default="main",
    show_default=True,
    help="Test function to pair with (the 'halasz' one only exists for d = 2)",
)
@click.option(
    "--epsilon-sweep",
    "epsilon_sweep",
    default=None,
    metavar="EPS,...",
    help="Comma-separated list of epsilons to sweep instead of a certificate",
)
@output_options
def cli_pair(
    points: str | None,
    family: str,
    npoints: int | None,
    m: int | None,
    dim: int,
    seed: int,
    epsilon: float | None,
    index: int | None,
    certificate: str,
    epsilon_sweep: str | None,
    out: str | None,
    timing: bool,
) -> None:
    """Pair the discrepancy function with a dual test function"""
    from dyadic_discrepancy import dualcert
    from dyadic_discrepancy.discrepancy import hyperbolic_index
    from dyadic_discrepancy.verify import Check

    ctx = click.get_current_context()
    pointset = get_pointset(points, family, npoints, m, dim, seed)
    epsilon = check_epsilon(epsilon)

    if index is None:
        index = hyperbolic_index(pointset.npoints)

    try:
        cfg = dualcert.CertificateConfig(n=index, epsilon=epsilon)
        if certificate == "halasz" and pointset.dim != 2:
            raise ValueError(
                f"The 'halasz' certificate needs d = 2: got '{pointset.dim}'"
            )
        epsilons = (
            None
            if epsilon_sweep is None
            else [float(e) for e in epsilon_sweep.split(",") if e.strip()]
        )
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc

    if epsilons is not None:
        with timeit("Epsilon sweep") as timer:
            sweep = dualcert.epsilon_sweep(pointset, epsilons, n=index)

        checks = [
            Check(f"pair.sweep[epsilon={e:g}]", None, measured=value,
                  notes="positive" if value > 0 else "not positive")
            for e, value in sweep
        ]
        report = make_report(
            ctx, checks,
            timing={"total": timer.elapsed_ms} if timing else None,
            sweep=[{"epsilon": e, "pairing": value} for e, value in sweep],
        )
        write_output(dump_json(report), out)
        return

    with timeit(f"Certificate '{certificate}' for n = {index}") as timer:
        if certificate == "halasz":
            result = dualcert.halasz_certificate(pointset, cfg)
        else:
            result = dualcert.main_certificate(pointset, cfg)

    checks = [
        Check("pair.positive", result.pairing > 0,
              measured=result.pairing, bound=0.0),
        Check("pair.sup_norm", result.sup_norm <= 1.0,
              measured=result.sup_norm, bound=1.0),
    ]
    if result.leading_term is not None and result.leading_floor is not None:
        checks.append(
            Check("pair.leading_term", result.leading_term >= result.leading_floor,
                  measured=result.leading_term, bound=result.leading_floor)
        )
    if result.linearity_residual is not None:
        tol = 1.0e-9 * max(1.0, abs(result.pairing))
        checks.append(
            Check("pair.linearity", result.linearity_residual <= tol,
                  measured=result.linearity_residual, bound=tol)
        )

    report = make_report(
        ctx, checks,
        timing={"total": timer.elapsed_ms} if timing else None,
        certificate=result.to_dict(),
    )
    write_output(dump_json(report), out)
    exit_with_checks(ctx, checks)


# }}}


# {{{ norms


@cli.command("norms")
@click.help_option("--help", "-h")
@pointset_options
@click.option(
    "-r",
    "--resolution",
    type=int,
    default=None,
    help="Level of the grid in every coordinate (by default the index n)",
)
@click.option(
    "--pnorms",
    flag_value=True,
    default=False,
    is_flag=True,
    help="Also report the quasi-norms for p in (0, 1)",
)
@output_options
def cli_norms(
    points: str | None,
    family: str,
    npoints: int | None,
    m: int | None,
    dim: int,
    seed: int,
    resolution: int | None,
    pnorms: bool,
    out: str | None,
    timing: bool,
) -> None:
    """Compute norms of the discrepancy function on a grid"""
    from dyadic_discrepancy.discrepancy import hyperbolic_index
    from dyadic_discrepancy.dyadic import check_resolution
    from dyadic_discrepancy.norms import dn_norm_suite, empirical_pnorms
    from dyadic_discrepancy.verify import Check

    ctx = click.get_current_context()
    pointset = get_pointset(points, family, npoints, m, dim, seed)

    if resolution is None:
        resolution = hyperbolic_index(pointset.npoints)

    try:
        levels = check_resolution((resolution,) * pointset.dim)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc

    with timeit(f"Norms at resolution {levels}") as timer:
        reports = dn_norm_suite(pointset, levels)
        quasi = empirical_pnorms(pointset, levels) if pnorms else None

    values = {report.meta["metric"]: report.value for report in reports}
    checks = [
        Check("norms.jensen", values["l1"] <= values["l2"] * (1 + 1.0e-12),
              measured=values["l1"], bound=values["l2"], notes="l1 <= l2"),
    ]

    # NOTE: convergence under refinement is reported, never asserted
    checks.extend(
        Check(
            f"norms.refinement[{report.meta['metric']}]",
            None,
            measured=report.meta["relative_change"],
            notes="converged" if report.meta["converged"] else "not converged",
        )
        for report in reports
        if "converged" in report.meta
    )

    report = make_report(
        ctx, checks,
        timing={"total": timer.elapsed_ms} if timing else None,
        norms=[r.to_dict() for r in reports],
        pnorms=quasi,
    )
    write_output(dump_json(report), out)
    exit_with_checks(ctx, checks)


# }}}


# {{{ verify


@cli.command("verify")
@click.help_option("--help", "-h")
@click.option(
    "-s",
    "--suite",
    type=click.Choice(["props", "expansion", "khintchine", "hardy", "all"],
                      case_sensitive=False),
    default="all",
    show_default=True,
    help="Suite of checks to run",
)
@click.option(
    "--max-n",
    type=int,
    default=8,
    show_default=True,
    help="Largest index n of the point sets (N = 2^(n - 1) points)",
)
@click.option(
    "-f",
    "--family",
    type=click.Choice(FAMILIES, case_sensitive=False),
    default="vdc",
    show_default=True,
    help="Point set family ('vdc' means 'halton' for d > 2)",
)
@click.option("--seed", type=int, default=0, show_default=True,
              help="Seed for random point sets and random signs")
@click.option(
    "-e",
    "--epsilon",
    type=float,
    default=None,
    help="Constant inside the sines (defaults to the 'epsilon' setting)",
)
@output_options
def cli_verify(
    suite: str,
    max_n: int,
    family: str,
    seed: int,
    epsilon: float | None,
    out: str | None,
    timing: bool,
) -> None:
    """Run the numerical verification suites"""
    from dyadic_discrepancy.verify import VerifyOptions, run_suite

    ctx = click.get_current_context()
    try:
        opts = VerifyOptions(
            suite=suite.lower(),
            max_n=max_n,
            family=family.lower(),
            seed=seed,
            epsilon=check_epsilon(epsilon),
        )
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc

    checks, suite_timing = run_suite(opts)
    report = make_report(ctx, checks, timing=suite_timing if timing else None)
    write_output(dump_json(report), out)
    exit_with_checks(ctx, checks)


# }}}


# {{{ sweep


@dataclass(frozen=True)
class SweepRow:
    family: str
    d: int
    n: int
    npoints: int
    metric: str
    value: float | None
    """Measured value, or *None* when the computation exceeded a cap."""
    bound: float | None
    """Derived lower bound for the value, if there is one."""
    ms: float | None = None

    def to_csv(self) -> str:
        def fmt(x: float | None, spec: str = ".12g") -> str:
            return "NA" if x is None or not math.isfinite(x) else format(x, spec)

        return ",".join([
            self.family, str(self.d), str(self.n), str(self.npoints), self.metric,
            fmt(self.value), fmt(self.bound), fmt(self.ms, ".3f"),
        ])


def _sweep_metrics(
    pointset: PointSet, n: int, epsilon: float, p: float
) -> dict[str, Callable[[], tuple[float | None, float | None]]]:
    from functools import cache

    from dyadic_discrepancy import dualcert
    from dyadic_discrepancy.dyadic import ResolutionError

    d = pointset.dim
    cfg = dualcert.CertificateConfig(n=n, epsilon=epsilon)

    @cache
    def norms() -> dict[str, float]:
        from dyadic_discrepancy.norms import dn_norm_suite

        reports = dn_norm_suite(pointset, (n,) * d)
        return {r.meta["metric"]: r.value for r in reports}

    @cache
    def certificate() -> dualcert.PairingReport:
        return dualcert.main_certificate(pointset, cfg)

    def implied_l1() -> float | None:
        try:
            return certificate().implied_l1_bound
        except (dualcert.CombinatorialGuardError, ResolutionError):
            return None

    def pairing_psi() -> tuple[float | None, float | None]:
        # NOTE: in d = 2 the main certificate pairs with the same function
        if d != 2:
            return None, None

        return certificate().pairing, 0.0

    def hardy_sq_p() -> tuple[float | None, float | None]:
        from dyadic_discrepancy.hardy import hardy_lower_report

        report = hardy_lower_report(pointset, p, n=n)
        return report.square_pnorm, report.square_floor

    return {
        "l1": lambda: (norms()["l1"], implied_l1()),
        "l2": lambda: (norms()["l2"], implied_l1()),
        "l1logl": lambda: (norms()["l1logl"], None),
        "pairing_psi": pairing_psi,
        "pairing_phi": lambda: (certificate().pairing, 0.0),
        "hardy_sq_p": hardy_sq_p,
    }


def sweep_rows(
    family: str,
    dim: int,
    ns: Sequence[int],
    metrics: Sequence[str],
    *,
    epsilon: float,
    p: float = 1.0,
    seed: int = 0,
    timing: bool = False,
) -> list[SweepRow]:
    """Evaluate *metrics* on the point sets with :math:`N = 2^{n - 1}` points."""
    from dyadic_discrepancy.dualcert import CombinatorialGuardError
    from dyadic_discrepancy.dyadic import ResolutionError
    from dyadic_discrepancy.verify import family_pointset

    rows = []
    for n in ns:
        pointset = family_pointset(family, dim, n, seed)
        compute = _sweep_metrics(pointset, n, epsilon, p)

        for metric in metrics:
            with timeit(f"Metric '{metric}' for n = {n}") as timer:
                try:
                    value, bound = compute[metric]()
                except (CombinatorialGuardError, ResolutionError) as exc:
                    log.warning("Skipping '%s' for n = %d: %s", metric, n, exc)
                    value = bound = None

            rows.append(SweepRow(
                family=family,
                d=dim,
                n=n,
                npoints=pointset.npoints,
                metric=metric,
                value=value,
                bound=bound,
                ms=timer.elapsed_ms if timing else None,
            ))

    return rows


def format_csv(rows: Sequence[SweepRow]) -> str:
    lines = [",".join(SWEEP_HEADER)]
    lines.extend(row.to_csv() for row in rows)
    return "\n".join(lines) + "\n"


def render_svg(
    rows: Sequence[SweepRow], *, width: int = 640, height: int = 400
) -> str:
    """Draw each metric against *n* as a polyline, normalized by its largest value."""
    colors = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b")
    margin = 50

    series: dict[str, list[tuple[int, float]]] = {}
    for row in rows:
        if row.value is not None and math.isfinite(row.value):
            series.setdefault(row.metric, []).append((row.n, row.value))

    ns = [row.n for row in rows] or [0]
    nmin, nmax = min(ns), max(ns)

    def x(n: int) -> float:
        span = max(nmax - nmin, 1)
        return margin + (width - 2 * margin) * (n - nmin) / span

    def y(v: float) -> float:
        return height - margin - (height - 2 * margin) * v

    elements = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}"'
        f' viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}"'
        f' y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}"'
        ' stroke="black"/>',
        f'<text x="{width / 2:.1f}" y="{height - 10}" text-anchor="middle">n</text>',
    ]

    for n in sorted(set(ns)):
        elements.append(
            f'<text x="{x(n):.1f}" y="{height - margin + 15}"'
            f' text-anchor="middle" font-size="10">{n}</text>'
        )

    for i, (metric, values) in enumerate(series.items()):
        color = colors[i % len(colors)]
        scale = max(abs(v) for _, v in values) or 1.0
        coords = " ".join(f"{x(n):.1f},{y(v / scale):.1f}" for n, v in values)
        elements.extend([
            f'<polyline points="{coords}" fill="none" stroke="{color}"/>',
            f'<text x="{width - margin + 5}" y="{margin + 15 * i}"'
            f' font-size="10" fill="{color}">{metric}</text>',
        ])

    elements.append("</svg>")
    return "\n".join(elements) + "\n"


@cli.command("sweep")
@click.help_option("--help", "-h")
@click.option(
    "-f",
    "--family",
    type=click.Choice(FAMILIES, case_sensitive=False),
    default="vdc",
    show_default=True,
    help="Point set family",
)
@click.option("-d", "--dim", type=int, default=2, show_default=True,
              help="Dimension of the point sets")
@click.option("--n-min", type=int, default=4, show_default=True,
              help="Smallest index n (N = 2^(n - 1) points)")
@click.option("--n-max", type=int, default=8, show_default=True,
              help="Largest index n")
@click.option(
    "--metric",
    "metrics",
    type=click.Choice(SWEEP_METRICS, case_sensitive=False),
    multiple=True,
    help="Metrics to compute (all by default)",
)
@click.option("-p", type=float, default=1.0, show_default=True,
              help="Exponent of the square function norm for 'hardy_sq_p'")
@click.option(
    "-e",
    "--epsilon",
    type=float,
    default=None,
    help="Constant inside the sines (defaults to the 'epsilon' setting)",
)
@click.option("--seed", type=int, default=0, show_default=True,
              help="Seed for random point sets")
@click.option(
    "--svg",
    type=click.Path(dir_okay=False),
    default=None,
    help="Also draw the metrics against n into this SVG file",
)
@output_options
def cli_sweep(
    family: str,
    dim: int,
    n_min: int,
    n_max: int,
    metrics: tuple[str, ...],
    p: float,
    epsilon: float | None,
    seed: int,
    svg: str | None,
    out: str | None,
    timing: bool,
) -> None:
    """Tabulate norms, pairings and square functions over a range of n"""
    epsilon = check_epsilon(epsilon)

    if dim < 2:
        raise click.UsageError(f"Dimension must be at least 2: '{dim}'")

    if not 2 <= n_min <= n_max:
        raise click.UsageError(f"Need 2 <= n-min <= n-max: got [{n_min}, {n_max}]")

    if not 0 < p <= 1:
        raise click.UsageError(f"Exponent must be in (0, 1]: '{p}'")

    if family == "vdc" and dim != 2:
        raise click.UsageError(f"Family 'vdc' only exists for d = 2: got '{dim}'")

    rows = sweep_rows(
        family.lower(),
        dim,
        range(n_min, n_max + 1),
        metrics or SWEEP_METRICS,
        epsilon=epsilon,
        p=p,
        seed=seed,
        timing=timing,
    )

    write_output(format_csv(rows), out)
    if svg is not None:
        with open(svg, "w", encoding="utf-8") as outf:
            outf.write(render_svg(rows))

        log.info("Chart saved in '%s'.", svg)


# }}}
