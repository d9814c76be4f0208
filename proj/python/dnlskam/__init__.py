"""DNLS KAM toolkit: the CLI commands as Python calls."""

import json
from dataclasses import dataclass, field
from decimal import Decimal

from ._core import (
    ConfigError,
    SiteIndexError,
    KamGlobals,
    admissible,
    lemma32,
    normalize_config,
    run_command,
    schedule,
)

SCHEMA_VERSION = 1


@dataclass
class Result:
    exit_code: int
    report: dict
    steps: list = field(default_factory=list)  # kam only; floats parsed as Decimal
    warnings: list = field(default_factory=list)
    files: dict = field(default_factory=dict)

    @property
    def ok(self):
        return self.exit_code == 0


def _config_text(config, overrides):
    doc = {"schema_version": SCHEMA_VERSION}
    doc.update(config or {})
    doc.update(overrides)
    return json.dumps(doc)


def run(command, config=None, files=False, require_gate=False, **overrides):
    code, report, stream, warnings, out = run_command(
        command, _config_text(config, overrides), files, require_gate
    )
    steps = [json.loads(line, parse_float=Decimal) for line in stream.splitlines() if line]
    return Result(code, json.loads(report), steps, list(warnings), dict(out))


def config(config=None, **overrides):
    """Resolved config with defaults filled in."""
    return json.loads(normalize_config(_config_text(config, overrides)))


__all__ = [
    "ConfigError",
    "SiteIndexError",
    "KamGlobals",
    "Result",
    "admissible",
    "config",
    "lemma32",
    "run",
    "schedule",
]
