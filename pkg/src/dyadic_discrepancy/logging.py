# SPDX-FileCopyrightText: 2024 dyadic-discrepancy developers
# SPDX-License-Identifier: MIT

from __future__ import annotations

import logging
import os


def get_logger(
    module: str,
    level: int | str = logging.INFO,
) -> logging.Logger:
    """Create a new logging for the module *module*.

    The logger is created using a :class:`rich.logging.RichHandler` for fancy
    highlighting. The handler writes to standard error, since standard output
    is reserved for the JSON and CSV reports. The ``NO_COLOR`` environment
    variable can be used to disable colors.

    :arg module: a name for the module to create a logger for.
    :arg level: default logging level.
    """
    if isinstance(level, str):
        level = getattr(logging, level.upper())

    assert isinstance(level, int)

    name, *rest = module.split(".", maxsplit=1)
    root = logging.getLogger(name)

    if not root.handlers:
        from rich.console import Console
        from rich.highlighter import NullHighlighter
        from rich.logging import RichHandler

        no_color = "NO_COLOR" in os.environ
        handler = RichHandler(
            level,
            console=Console(stderr=True),
            show_time=True,
            omit_repeated_times=False,
            show_level=True,
            show_path=True,
            highlighter=NullHighlighter() if no_color else None,
            markup=True,
        )

        root.addHandler(handler)
        root.setLevel(level)

    return root.getChild(rest[0]) if rest else root


def set_log_level(level: int | str) -> None:
    """Set the level of the package root logger (and its handlers)."""
    if isinstance(level, str):
        level = getattr(logging, level.upper())

    assert isinstance(level, int)

    root = get_logger(__name__.split(".", maxsplit=1)[0])
    root.setLevel(level)
    for handler in root.handlers:
        handler.setLevel(level)
