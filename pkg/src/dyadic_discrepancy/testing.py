# SPDX-FileCopyrightText: 2024 dyadic-discrepancy developers
# SPDX-License-Identifier: MIT

from __future__ import annotations

import configparser
import pathlib
import tempfile
from collections.abc import Iterator, Sequence
from types import TracebackType
from typing import Any

import click
import click.testing
import pytest
from _pytest.config import Config
from _pytest.fixtures import SubRequest

from dyadic_discrepancy.config import PROJECT_NAME


class TemporaryConfiguration:
    """A context manager used to create a temporary configuration.

    The configuration file is created in a temporary directory and
    ``XDG_CONFIG_HOME`` is set to point to it, so that tests do not read the
    settings of the user. It can be used as

    .. code:: python

        with TemporaryConfiguration({"epsilon": "0.1"}):
            assert config.getfloat("epsilon") == 0.1
    """

    def __init__(self, settings: dict[str, Any] | None = None) -> None:
        self.settings: dict[str, Any] = settings or {}
        """Settings written to the ``[dyadic-discrepancy]`` section on creation."""

        self.configdir: pathlib.Path | None = None
        """When entering the context manager, this will contain the folder of
        the configuration file.
        """
        self.configfile: pathlib.Path | None = None
        """When entering the context manager, this will contain the
        configuration file.
        """

        self._tmpdir: tempfile.TemporaryDirectory[str] | None = None
        self._monkeypatch: pytest.MonkeyPatch | None = None

    @property
    def tmpdir(self) -> pathlib.Path:
        """Base temporary directory name."""
        assert self._tmpdir
        return pathlib.Path(self._tmpdir.name)

    def __enter__(self) -> TemporaryConfiguration:
        if self._tmpdir is not None:
            raise ValueError(f"{type(self).__name__!r} cannot be nested")

        self._tmpdir = tempfile.TemporaryDirectory(prefix="dyadic-test-")

        self.configdir = self.tmpdir / PROJECT_NAME
        self.configfile = self.configdir / "config"
        self.configdir.mkdir(parents=True)

        with open(self.configfile, "w", encoding="utf-8") as fd:
            config = configparser.ConfigParser()
            config.read_dict({
                PROJECT_NAME: {k: str(v) for k, v in self.settings.items()}
            })
            config.write(fd)

        self._monkeypatch = pytest.MonkeyPatch()
        self._monkeypatch.setenv("XDG_CONFIG_HOME", str(self.tmpdir))
        self._monkeypatch.setenv("NO_COLOR", "1")

        from dyadic_discrepancy import config as dconfig

        dconfig.reset_configuration()
        return self

    def __exit__(
        self,
        exc_type: type[BaseException] | None,
        exc_val: BaseException | None,
        exc_tb: TracebackType | None,
    ) -> None:
        if self._monkeypatch:
            self._monkeypatch.undo()
        if self._tmpdir:
            self._tmpdir.cleanup()

        from dyadic_discrepancy import config as dconfig

        dconfig.reset_configuration()

        self._tmpdir = None
        self._monkeypatch = None
        self.configdir = None
        self.configfile = None


class DyadicRunner(click.testing.CliRunner):
    """A wrapper around :class:`click.testing.CliRunner`."""

    def invoke(  # type: ignore[override]
        self,
        cli: click.Command,
        args: Sequence[str],
        **kwargs: Any,
    ) -> click.testing.Result:
        """A simple wrapper around the :meth:`click.testing.CliRunner.invoke`
        method that does not catch exceptions by default.
        """

        if "catch_exceptions" not in kwargs:
            kwargs["catch_exceptions"] = False

        return super().invoke(cli, args, **kwargs)


@pytest.fixture(scope="function")
def tmp_config(request: SubRequest) -> Iterator[TemporaryConfiguration]:
    """A fixture that creates a :class:`TemporaryConfiguration`.

    Settings can be passed using the ``config_setup`` marker

    .. code:: python

        @pytest.mark.config_setup(settings={"grid-max-level": "12"})
        def test_me(tmp_config: TemporaryConfiguration) -> None:
            ...
    """
    marker = request.node.get_closest_marker("config_setup")
    kwargs = dict(marker.kwargs) if marker else {}

    # NOTE: support indirect fixture parameterizations that overwrite markers
    kwargs.update(getattr(request, "param", {}))

    with TemporaryConfiguration(**kwargs) as config:
        yield config


def pytest_configure(config: Config) -> None:
    config.addinivalue_line(
        "markers",
        "config_setup(**kwargs): pass kwargs to TemporaryConfiguration initialization",
    )
