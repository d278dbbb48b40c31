"""Loader for the flat key-value pipeline configuration format.

A file holds an optional top-level ``coupling`` assignment followed by one
``[level]`` section per rung, lowest first::

    coupling = tandem

    [level]
    label = L1
    arrival_rate = 6
    service_rate = 2
    capacity = 10
    designation = engineer
    signing_limit = 100

Blank lines and ``#`` comments are ignored.  Level ids are assigned from the
section order.  Errors always carry the offending line number, which is why
this is hand-rolled rather than configparser-based: configparser does not
track per-key line numbers, and bad values (not just bad syntax) must be
reported by line here.
"""

from __future__ import annotations

from pathlib import Path

from .errors import ConfigError
from .pipeline import Coupling, LevelConfig, PipelineModel

_LEVEL_KEYS = (
    "label",
    "arrival_rate",
    "service_rate",
    "capacity",
    "designation",
    "signing_limit",
)
_REQUIRED_LEVEL_KEYS = (
    "arrival_rate",
    "service_rate",
    "capacity",
    "designation",
    "signing_limit",
)


def load_pipeline_config(path) -> PipelineModel:
    """Parse a configuration file into a pipeline model.

    Raises ConfigError (with the line number) on any syntactic or semantic
    problem; raises FileNotFoundError if the file does not exist.
    """
    text = Path(path).read_text(encoding="utf-8")
    return parse_pipeline_config(text)


def parse_pipeline_config(text: str) -> PipelineModel:
    """Parse configuration text into a pipeline model."""
    coupling = Coupling.INDEPENDENT
    # Each section is a dict of key -> (value, line); line 0 marks "no section yet".
    sections: list[tuple[int, dict[str, tuple[str, int]]]] = []
    current: dict[str, tuple[str, int]] | None = None

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section != "level":
                raise ConfigError(f"unknown section [{section}]; only [level] is allowed", line_no)
            current = {}
            sections.append((line_no, current))
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", line_no)
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if current is None:
            if key != "coupling":
                raise ConfigError(
                    f"unknown key {key!r} before the first [level] section", line_no
                )
            try:
                coupling = Coupling(value)
            except ValueError:
                raise ConfigError(
                    f"coupling must be one of {[c.value for c in Coupling]}, got {value!r}",
                    line_no,
                ) from None
            continue
        if key not in _LEVEL_KEYS:
            raise ConfigError(f"unknown key {key!r} in [level] section", line_no)
        if key in current:
            raise ConfigError(f"duplicate key {key!r} in [level] section", line_no)
        current[key] = (value, line_no)

    if not sections:
        raise ConfigError("no [level] sections found", max(1, text.count("\n") + 1))

    levels = []
    previous_signing_limit = None
    for level_id, (section_line, keys) in enumerate(sections, start=1):
        for key in _REQUIRED_LEVEL_KEYS:
            if key not in keys:
                raise ConfigError(
                    f"[level] section for level {level_id} is missing key {key!r}",
                    section_line,
                )
        label = keys["label"][0] if "label" in keys else f"L{level_id}"
        arrival_rate = _positive_float(keys["arrival_rate"], "arrival_rate")
        service_rate = _positive_float(keys["service_rate"], "service_rate")
        capacity = _bounded_int(keys["capacity"], "capacity", minimum=1)
        signing_limit = _bounded_int(keys["signing_limit"], "signing_limit", minimum=0)
        if previous_signing_limit is not None and signing_limit < previous_signing_limit:
            raise ConfigError(
                f"signing_limit {signing_limit} is below the previous level's "
                f"{previous_signing_limit}; limits must not decrease up the ladder",
                keys["signing_limit"][1],
            )
        previous_signing_limit = signing_limit
        levels.append(
            LevelConfig(
                level_id=level_id,
                label=label,
                arrival_rate=arrival_rate,
                service_rate=service_rate,
                capacity=capacity,
                designation=keys["designation"][0],
                signing_limit=signing_limit,
            )
        )
    return PipelineModel(levels=tuple(levels), coupling=coupling)


def _positive_float(entry: tuple[str, int], key: str) -> float:
    value, line_no = entry
    try:
        number = float(value)
    except ValueError:
        raise ConfigError(f"{key} must be a number, got {value!r}", line_no) from None
    if not number > 0.0:
        raise ConfigError(f"{key} must be > 0, got {value}", line_no)
    return number


def _bounded_int(entry: tuple[str, int], key: str, minimum: int) -> int:
    value, line_no = entry
    try:
        number = int(value, 10)
    except ValueError:
        raise ConfigError(f"{key} must be an integer, got {value!r}", line_no) from None
    if number < minimum:
        raise ConfigError(f"{key} must be >= {minimum}, got {number}", line_no)
    return number
