"""Run configuration: size caps, default width and random seed.

Config files are flat ``key=value`` text; blank lines and lines starting
with ``#`` are ignored.  Command line flags override file values.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path


@dataclass(frozen=True)
class Config:
    pattern_blue: int = 10
    pattern_red: int = 14
    host_blue: int = 14
    host_red: int = 14
    iso_nodes: int = 12
    search_blue: int = 8
    pump_window: int = 64
    red_index_max: int = 64
    default_k: int = 2
    seed: int = 0

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not isinstance(value, int) or isinstance(value, bool):
                raise ValueError(f"config value {f.name} must be an integer")
            if f.name != "seed" and value <= 0:
                raise ValueError(f"config cap {f.name} must be positive")

    def with_overrides(self, **overrides) -> "Config":
        clean = {k: v for k, v in overrides.items() if v is not None}
        return replace(self, **clean)

    def as_dict(self) -> dict:
        return asdict(self)


DEFAULT_CONFIG = Config()

# Caps used when hom counting serves as an internal subroutine of the
# compilers (quantum components can be much larger than user patterns).
UNBOUNDED = Config(pattern_blue=10**6, pattern_red=10**6, host_blue=10**6,
                   host_red=10**6)


def parse_config_text(text: str) -> dict:
    known = {f.name for f in fields(Config)}
    values: dict = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"config line {number}: expected key=value")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in known:
            raise ValueError(f"config line {number}: unknown key {key!r}")
        try:
            values[key] = int(value)
        except ValueError:
            raise ValueError(f"config line {number}: {key} must be an integer") from None
    return values


def load_config(path: str | Path | None = None, **overrides) -> Config:
    base = DEFAULT_CONFIG
    if path is not None:
        base = base.with_overrides(**parse_config_text(Path(path).read_text()))
    return base.with_overrides(**overrides)
