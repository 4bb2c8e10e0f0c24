# SPDX-FileCopyrightText: 2024 dyadic-discrepancy developers
# SPDX-License-Identifier: MIT

from dyadic_discrepancy.testing import pytest_configure, tmp_config

__all__ = ["pytest_configure", "tmp_config"]
