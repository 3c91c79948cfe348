"""Runtime caps and tolerances.

Settings live in a context variable so concurrent callers can run with
different caps. ``load_config`` reads the ``key = value`` text format.
"""
from __future__ import annotations

import contextlib
import contextvars
from dataclasses import dataclass, fields, replace


@dataclass(frozen=True)
class Settings:
    precision_bits: int = 64          # first precision tried by certified comparisons
    precision_cap: int = 16384        # comparisons give up (PrecisionError) beyond this
    generator_budget: int = 1_000_000  # max interval-generator index
    run_budget: int = 5_000_000       # max runs streamed by a single set query
    magnitude_cap_bits: int = 4096    # constructed terms must stay below 2**cap
    window_fraction: float = 0.25     # tail window used by verdicts
    null_tolerance: float = 0.05
    positive_threshold: float = 0.1
    canonical_window: int = 64
    tail_bits: int = 42               # default digit depth is tail_bits + 8
    digit_cap: int = 4096             # max tail depth for auto-deepening
    dense_cap: int = 2_000_000        # max N for index-by-index scans


_current: contextvars.ContextVar[Settings] = contextvars.ContextVar("charsub_settings", default=Settings())


def settings() -> Settings:
    return _current.get()


@contextlib.contextmanager
def using(**overrides):
    token = _current.set(replace(_current.get(), **overrides))
    try:
        yield _current.get()
    finally:
        _current.reset(token)


def set_default(s: Settings) -> None:
    _current.set(s)


def parse_config(text: str, base: Settings | None = None) -> Settings:
    base = base or Settings()
    kinds = {f.name: f.type for f in fields(Settings)}
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in kinds:
            raise ValueError(f"config line {lineno}: unknown key {key!r}")
        values[key] = float(value) if kinds[key] == "float" else int(float(value))
    return replace(base, **values)


def load_config(path) -> Settings:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
