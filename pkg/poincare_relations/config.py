"""Run configuration: constants, then YAML, then environment, then CLI flags."""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import TYPE_CHECKING, Any

import voluptuous as vol
import yaml

from .const import (
    DEFAULT_MAX_CUTOFF,
    DEFAULT_PRECISION_BITS,
    DEFAULT_SERIES_ORDER,
    DEFAULT_TARGET_ERROR,
    DEFAULT_THREADS,
    ENV_PRECISION,
    ENV_THREADS,
    MIN_PRECISION_BITS,
    OUTPUT_FORMATS,
    OUTPUT_PRETTY,
)
from .errors import ConfigurationError

if TYPE_CHECKING:
    from collections.abc import Mapping

_LOGGER = logging.getLogger(__name__)

CONF_PRECISION_BITS = "precision_bits"
CONF_TARGET_ERROR = "target_error"
CONF_SERIES_ORDER = "series_order"
CONF_THREADS = "threads"
CONF_OUTPUT_FORMAT = "output_format"
CONF_MAX_CUTOFF = "max_cutoff"
CONF_LOGGER = "logger"
CONF_LOG_DEFAULT = "default"
CONF_LOG_LOGS = "logs"

LOG_LEVELS = ("debug", "info", "warning", "error", "critical")

LOGGER_SCHEMA = vol.Schema(
    {
        vol.Optional(CONF_LOG_DEFAULT, default="info"): vol.All(
            vol.Lower, vol.In(LOG_LEVELS)
        ),
        vol.Optional(CONF_LOG_LOGS, default={}): {
            str: vol.All(vol.Lower, vol.In(LOG_LEVELS))
        },
    }
)

RUN_CONFIG_SCHEMA = vol.Schema(
    {
        vol.Optional(CONF_PRECISION_BITS, default=DEFAULT_PRECISION_BITS): vol.All(
            vol.Coerce(int), vol.Range(min=MIN_PRECISION_BITS)
        ),
        vol.Optional(CONF_TARGET_ERROR, default=DEFAULT_TARGET_ERROR): vol.All(
            vol.Coerce(float), vol.Range(min=0, min_included=False)
        ),
        vol.Optional(CONF_SERIES_ORDER, default=DEFAULT_SERIES_ORDER): vol.All(
            vol.Coerce(int), vol.Range(min=1)
        ),
        vol.Optional(CONF_THREADS, default=DEFAULT_THREADS): vol.All(
            vol.Coerce(int), vol.Range(min=1)
        ),
        vol.Optional(CONF_OUTPUT_FORMAT, default=OUTPUT_PRETTY): vol.All(
            vol.Lower, vol.In(OUTPUT_FORMATS)
        ),
        vol.Optional(CONF_MAX_CUTOFF, default=DEFAULT_MAX_CUTOFF): vol.All(
            vol.Coerce(int), vol.Range(min=1)
        ),
        vol.Optional(CONF_LOGGER, default={}): LOGGER_SCHEMA,
    }
)


@dataclass(frozen=True, slots=True)
class RunConfig:
    """Validated settings shared by every command."""

    precision_bits: int = DEFAULT_PRECISION_BITS
    target_error: float = DEFAULT_TARGET_ERROR
    series_order: int = DEFAULT_SERIES_ORDER
    threads: int = DEFAULT_THREADS
    output_format: str = OUTPUT_PRETTY
    max_cutoff: int = DEFAULT_MAX_CUTOFF
    log_level: str = "info"
    log_levels: dict[str, str] = field(default_factory=dict)

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> RunConfig:
        """Validate a raw mapping against RUN_CONFIG_SCHEMA."""
        try:
            valid = RUN_CONFIG_SCHEMA(dict(data))
        except vol.Invalid as err:
            msg = f"Invalid run configuration: {err}"
            raise ConfigurationError(msg) from err
        logger = valid.pop(CONF_LOGGER)
        return cls(
            **valid,
            log_level=logger[CONF_LOG_DEFAULT],
            log_levels=dict(logger[CONF_LOG_LOGS]),
        )

    def as_mapping(self) -> dict[str, Any]:
        """Return the settings in the YAML layout accepted by from_mapping."""
        return {
            CONF_PRECISION_BITS: self.precision_bits,
            CONF_TARGET_ERROR: self.target_error,
            CONF_SERIES_ORDER: self.series_order,
            CONF_THREADS: self.threads,
            CONF_OUTPUT_FORMAT: self.output_format,
            CONF_MAX_CUTOFF: self.max_cutoff,
            CONF_LOGGER: {
                CONF_LOG_DEFAULT: self.log_level,
                CONF_LOG_LOGS: dict(self.log_levels),
            },
        }

    def with_overrides(self, **overrides: Any) -> RunConfig:
        """Return a revalidated copy with the non-None overrides applied."""
        changes = {key: value for key, value in overrides.items() if value is not None}
        if not changes:
            return self
        try:
            merged = replace(self, **changes).as_mapping()
        except TypeError as err:
            msg = f"Unknown run configuration key in {sorted(changes)}"
            raise ConfigurationError(msg) from err
        return RunConfig.from_mapping(merged)


def _read_yaml(path: Path) -> dict[str, Any]:
    """Load a YAML mapping from disk."""
    try:
        with path.open(encoding="utf-8") as handle:
            data = yaml.safe_load(handle) or {}
    except OSError as err:
        msg = f"Cannot read configuration file {path}: {err}"
        raise ConfigurationError(msg) from err
    except yaml.YAMLError as err:
        msg = f"Configuration file {path} is not valid YAML: {err}"
        raise ConfigurationError(msg) from err
    if not isinstance(data, dict):
        msg = f"Configuration file {path} must contain a mapping"
        raise ConfigurationError(msg)
    return data


def load_run_config(
    path: str | Path | None = None,
    env: Mapping[str, str] | None = None,
    overrides: Mapping[str, Any] | None = None,
) -> RunConfig:
    """
    Build a RunConfig from its layers.

    Args:
        path: Optional YAML file; its keys match RunConfig plus a `logger` block.
        env: Environment mapping, `os.environ` when omitted.
        overrides: CLI values; None entries are ignored.

    Returns:
        The validated configuration.

    """
    data: dict[str, Any] = {}
    if path is not None:
        data.update(_read_yaml(Path(path)))
        _LOGGER.debug("Loaded configuration file %s", path)

    environ = os.environ if env is None else env
    if (precision := environ.get(ENV_PRECISION)) is not None:
        data[CONF_PRECISION_BITS] = precision
    if (threads := environ.get(ENV_THREADS)) is not None:
        data[CONF_THREADS] = threads

    config = RunConfig.from_mapping(data).with_overrides(**(overrides or {}))
    _LOGGER.debug("Effective run configuration: %s", config)
    return config
