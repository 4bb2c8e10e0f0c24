# SPDX-FileCopyrightText: 2024 dyadic-discrepancy developers
# SPDX-License-Identifier: MIT

from __future__ import annotations

import configparser
import functools
import pathlib

from dyadic_discrepancy.logging import get_logger

log = get_logger(__name__)

# {{{ constants

PROJECT_NAME = "dyadic-discrepancy"
"""Name used for the configuration folder and the settings section."""

GRID_MAX_LEVEL = 26
"""Default cap on the total level :math:`m_1 + \\cdots + m_d` of a grid, i.e. a
grid has at most :math:`2^{26}` cells (about 67M) unless overridden.
"""

DEFAULT_EPSILON = 0.2
"""Default small constant :math:`\\epsilon` in the sine test functions."""

GV_MAX_SUBSETS = 10**6
"""Largest number of subsets :math:`\\binom{n - 1}{v}` accepted when building
the subset-product sums :math:`G_v`.
"""

EXPANSION_MAX_N = 8
"""Largest *n* accepted by the symbolic expansion of powers of the hyperbolic sum."""
EXPANSION_MAX_K = 7
"""Largest power *k* accepted by the symbolic expansion."""

SINE_SERIES_ORDER = 25
"""Highest odd power kept when the sine is expanded in powers of the hyperbolic sum."""

GAMMA_ENUMERATION_MAX_H = 16
"""Largest number of signs for the exact moment enumeration."""

RADEMACHER_MAX_TERMS = 20
"""Largest number of coefficients for the exact sign-pattern enumeration."""

HALTON_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19)
"""Bases of the radical inverses used by the Halton generator (so :math:`d \\le 8`)."""

PNORM_EXPONENTS = (2, 3, 4, 6, 8, 12, 16, 24, 32)
"""Exponents used to approximate :math:`\\sup_{p > 1} p^{-1/\\alpha} \\|f\\|_p`."""

ORLICZ_RTOL = 1.0e-13
"""Relative tolerance of the bisection for Luxemburg norms."""

REFINEMENT_TOLERANCE = 1.0e-2
"""Relative change between resolutions *m* and *m + 1* accepted as converged."""

HALASZ_SQRT_N_BAND = (5.0e-4, 2.0)
"""Band for :math:`\\langle D_N, \\Psi \\rangle / \\sqrt{n}` of the van der Corput
sets at :data:`DEFAULT_EPSILON`. The lower end is below
:math:`\\delta(1) (n - 1) / (128 n)` minus the higher order terms and the upper
end is above the sup norm of :math:`D_N` for :math:`n \\le 12`."""

HARDY_GROWTH_BAND = (1.0e-5, 10.0)
"""Band for :math:`\\|S D_N\\|_p / n^{(d - 1) / 2}` with :math:`p \\le 1`. The
lower end is below the square function floor for :math:`d \\le 3` and the upper
end is above :math:`\\|D_N\\|_2 / n^{(d - 1) / 2}` for the generated families."""

DERIVED_CONSTANTS = {
    "rvec_floor": "4^-d / 8",
    "gt_n_bound": "N 2^-|s|",
    "leading_floor": "delta(1) n^-1/2 |H_n^2| 4^-d / 8",
    "good_set_measure": "1/2",
    "level_set_mass": "1/4",
    "sum_indicator_pnorm_floor": "(J/4) (1/4)^(1/p)",
    "square_function_floor": "(4^-2d / 16)^1/2 (J/4)^1/2 (1/4)^(1/p)",
    "khintchine_constant": "sqrt(p)",
    "kexp_constant": "3",
    "pnorm_equivalence_band": "[0.1, 10]",
    "dual_pairing_bound": "100",
    "halasz_sqrt_n_band": "[5e-4, 2]",
    "hardy_growth_band": "[1e-5, 10]",
}
"""Ledger of the explicit constants used by the checks. They follow from the
counting arguments in the proofs and are not constants stated in the literature.
"""

# }}}


# {{{ settings

DEFAULT_SETTINGS: dict[str, str] = {
    "grid-max-level": str(GRID_MAX_LEVEL),
    "epsilon": str(DEFAULT_EPSILON),
    "gv-max-subsets": str(GV_MAX_SUBSETS),
    "log-level": "INFO",
}
"""Default values of the user settings in the ``[dyadic-discrepancy]`` section."""


def get_config_folder() -> pathlib.Path:
    """Folder containing the configuration file (honors ``XDG_CONFIG_HOME``)."""
    import platformdirs

    return platformdirs.user_config_path(PROJECT_NAME)


def get_config_file() -> pathlib.Path:
    return get_config_folder() / "config"


@functools.lru_cache(maxsize=1)
def _get_configuration() -> configparser.ConfigParser:
    config = configparser.ConfigParser()
    config.read_dict({PROJECT_NAME: DEFAULT_SETTINGS})

    filename = get_config_file()
    if filename.exists():
        log.debug("Reading configuration from '%s'.", filename)
        config.read(filename, encoding="utf-8")

    return config


def reset_configuration() -> None:
    """Forget any cached settings, so that they are read again on next access."""
    _get_configuration.cache_clear()


def get(key: str, *, section: str = PROJECT_NAME) -> str:
    config = _get_configuration()
    if not config.has_option(section, key):
        raise ValueError(f"Unknown setting '{key}' in section '{section}'")

    return config.get(section, key)


def getint(key: str, *, section: str = PROJECT_NAME) -> int:
    value = get(key, section=section)
    try:
        return int(value)
    except ValueError:
        raise ValueError(f"Setting '{key}' is not an integer: '{value}'") from None


def getfloat(key: str, *, section: str = PROJECT_NAME) -> float:
    value = get(key, section=section)
    try:
        return float(value)
    except ValueError:
        raise ValueError(f"Setting '{key}' is not a number: '{value}'") from None


# }}}
