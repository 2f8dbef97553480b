"""Plain-text ``key=value`` configuration files."""
from __future__ import annotations

import dataclasses
from pathlib import Path

from ..core import CampbellMode, ConfigError, SystemConfig

_OPTIONAL = {"r_sim", "r_sim_e"}
_INTS = {"n_t", "tau"}


def _parse_value(key: str, text: str):
    if key in _OPTIONAL and text.lower() in ("none", ""):
        return None
    if key == "campbell_mode":
        try:
            return CampbellMode(text)
        except ValueError:
            choices = ", ".join(m.value for m in CampbellMode)
            raise ConfigError(f"expected one of {choices}, got {text!r}") from None
    if key in _INTS:
        try:
            return int(text)
        except ValueError:
            raise ConfigError(f"expected an integer, got {text!r}") from None
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"expected a number, got {text!r}") from None


def parse_overrides(text: str, source: str = "<string>") -> dict:
    """Parse config text into a dict of field values, checking keys and types."""
    names = set(SystemConfig.field_names())
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key=value, got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in names:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in out:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        try:
            out[key] = _parse_value(key, value)
        except ConfigError as exc:
            raise ConfigError(f"{source}:{lineno}: {key}: {exc}") from None
    return out


def _line_of(text: str, key: str) -> int:
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if raw.split("#", 1)[0].split("=", 1)[0].strip() == key:
            return lineno
    return 0


def build_config(overrides: dict, base: SystemConfig | None = None, text: str = "",
                 source: str = "<string>") -> SystemConfig:
    base = base or SystemConfig()
    try:
        return dataclasses.replace(base, **overrides)
    except ConfigError as exc:
        # name the offending key and line when the message mentions one
        msg = str(exc)
        for key in overrides:
            if msg.startswith(key):
                raise ConfigError(f"{source}:{_line_of(text, key)}: {key}: {msg}") from None
        raise ConfigError(f"{source}: {msg}") from None


def read_overrides(path) -> tuple[dict, str]:
    text = Path(path).read_text()
    return parse_overrides(text, str(path)), text


def load_config(path, base: SystemConfig | None = None) -> SystemConfig:
    """Read a config file; keys not present keep the values of ``base`` (or the defaults)."""
    overrides, text = read_overrides(path)
    return build_config(overrides, base, text, str(path))


def _format(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, CampbellMode):
        return value.value
    if isinstance(value, float):
        return repr(value)
    return str(value)


def dump_config(cfg: SystemConfig) -> str:
    lines = [f"{f.name}={_format(getattr(cfg, f.name))}" for f in dataclasses.fields(cfg)]
    return "\n".join(lines) + "\n"


def save_config(cfg: SystemConfig, path) -> None:
    Path(path).write_text(dump_config(cfg))
