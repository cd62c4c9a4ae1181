"""Runtime limits and cache location, read from the environment."""

import os
import re
from dataclasses import dataclass, field
from pathlib import Path

DEFAULT_MEM_LIMIT = 8 << 30

_UNITS = {"": 1, "K": 1 << 10, "M": 1 << 20, "G": 1 << 30, "T": 1 << 40}


class MemoryGuardError(MemoryError):
    """Estimated working set exceeds the configured cap."""


def parse_size(text):
    """'8G', '512M', '1048576' -> bytes."""
    m = re.fullmatch(r"\s*(\d+(?:\.\d+)?)\s*([KMGT]?)(?:i?B)?\s*", str(text), re.I)
    if not m:
        raise ValueError(f"bad size: {text!r}")
    return int(float(m.group(1)) * _UNITS[m.group(2).upper()])


@dataclass
class RunConfig:
    cache_dir: Path | None = None
    mem_limit: int = DEFAULT_MEM_LIMIT
    threads: int = 1
    output: str = "plain"
    verbose: int = 0
    use_cache: bool = field(default=False)

    def __post_init__(self):
        if self.mem_limit <= 0:
            raise ValueError("memory cap must be positive")
        if self.threads < 1:
            raise ValueError("thread count must be >= 1")


def from_env(env=None):
    env = os.environ if env is None else env
    cache = env.get("HITPROB_CACHE")
    return RunConfig(
        cache_dir=Path(cache) if cache else None,
        mem_limit=parse_size(env.get("HITPROB_MEM_LIMIT", DEFAULT_MEM_LIMIT)),
        threads=int(env.get("HITPROB_THREADS", 1)),
        use_cache=bool(cache),
    )


_current = from_env()


def current():
    return _current


def configure(cfg):
    global _current
    _current = cfg


def format_size(nbytes):
    for unit, shift in (("GiB", 30), ("MiB", 20), ("KiB", 10)):
        if nbytes >= 1 << shift:
            return f"{nbytes / (1 << shift):.1f} {unit}"
    return f"{int(nbytes)} B"


def check_size(nbytes, what="allocation"):
    if nbytes > _current.mem_limit:
        raise MemoryGuardError(
            f"{what} needs about {format_size(nbytes)}, "
            f"cap is {format_size(_current.mem_limit)} (HITPROB_MEM_LIMIT)"
        )
