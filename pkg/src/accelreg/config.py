"""Flat ``key=value`` configuration files.

Blank lines and lines starting with ``#`` are ignored.  Values are stored
as strings and converted against a dataclass's field types by
:func:`build`.
"""

from __future__ import annotations

import dataclasses
import typing
from pathlib import Path

from .errors import DomainError


def parse(text: str) -> dict[str, str]:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise DomainError(f"config line {lineno}: expected key=value, got {raw!r}")
        if key in out:
            raise DomainError(f"config line {lineno}: duplicate key {key!r}")
        out[key] = value.strip()
    return out


def serialize(config: dict[str, str]) -> str:
    lines = []
    for key in sorted(config):
        value = str(config[key])
        if "\n" in value or "=" in key or key != key.strip() or value != value.strip():
            raise DomainError(f"cannot serialize {key!r}={value!r}")
        lines.append(f"{key}={value}")
    return "\n".join(lines) + "\n"


def load(path) -> dict[str, str]:
    return parse(Path(path).read_text())


def _convert(value: str, tp, key: str):
    origin = typing.get_origin(tp)
    if origin is typing.Union:
        args = [a for a in typing.get_args(tp) if a is not type(None)]
        if value.lower() in ("", "none"):
            return None
        return _convert(value, args[0], key)
    try:
        if tp is bool:
            low = value.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(value)
        if tp is int:
            return int(value)
        if tp is float:
            return float(value)
        if tp is tuple or origin is tuple:
            return tuple(v.strip() for v in value.split(",") if v.strip())
        return value
    except ValueError:
        raise DomainError(f"invalid value for {key}: {value!r}") from None


def build(cls, values: dict[str, str]):
    """Instantiate dataclass ``cls`` from string values, rejecting unknown keys."""
    hints = typing.get_type_hints(cls)
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(values) - names
    if unknown:
        raise DomainError(f"unknown config keys: {', '.join(sorted(unknown))}")
    kwargs = {k: _convert(v, hints[k], k) for k, v in values.items()}
    return cls(**kwargs)


def to_values(obj) -> dict[str, str]:
    """Inverse of :func:`build` for a dataclass instance."""
    out = {}
    for f in dataclasses.fields(obj):
        v = getattr(obj, f.name)
        if v is None:
            out[f.name] = "none"
        elif isinstance(v, tuple):
            out[f.name] = ",".join(map(str, v))
        elif isinstance(v, float):
            out[f.name] = repr(v)
        else:
            out[f.name] = str(v)
    return out
