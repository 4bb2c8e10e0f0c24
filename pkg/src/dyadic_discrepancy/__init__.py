# SPDX-FileCopyrightText: 2024 dyadic-discrepancy developers
# SPDX-License-Identifier: MIT

from __future__ import annotations

from importlib import metadata

try:
    __version__ = metadata.version("dyadic-discrepancy")
except metadata.PackageNotFoundError:  # pragma: no cover
    __version__ = "0.0.0"
