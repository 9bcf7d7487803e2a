"""Runtime configuration: enumeration guards, series order, parallelism."""

from __future__ import annotations

import os
from contextlib import contextmanager
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Iterator, Optional


REPO_ROOT = Path(__file__).resolve().parents[1]
GRAMMAR_DIR = REPO_ROOT / "grammars"

JOBS_ENV_VAR = "STIRLING_LAB_JOBS"


def default_jobs() -> int:
    """Parallelism from the environment, 1 when unset."""
    raw = os.environ.get(JOBS_ENV_VAR, "").strip()
    if not raw:
        return 1
    try:
        jobs = int(raw)
    except ValueError:
        raise ValueError(f"{JOBS_ENV_VAR} must be a positive integer, got {raw!r}") from None
    if jobs < 1:
        raise ValueError(f"{JOBS_ENV_VAR} must be a positive integer, got {raw!r}")
    return jobs


@dataclass(frozen=True)
class GuardConfig:
    """Upper bounds on exhaustive enumeration."""

    max_perm_n: int = 10
    max_signed_n: int = 8
    max_stirling_count: int = 5_000_000


@dataclass(frozen=True)
class LabConfig:
    """Configuration shared by the library and the CLI."""

    guards: GuardConfig = field(default_factory=GuardConfig)
    series_order: int = 8
    jobs: int = field(default_factory=default_jobs)
    sample_points: int = 20
    seed: int = 42


_GUARD_FIELDS = {f.name for f in fields(GuardConfig)}
_active: Optional[LabConfig] = None


def get_config() -> LabConfig:
    """The active configuration, built from the environment on first use."""
    global _active
    if _active is None:
        _active = LabConfig()
    return _active


def configure(**changes) -> LabConfig:
    """Replace fields of the active configuration and return it.

    Guard fields (``max_perm_n`` and friends) may be given at top level.
    """
    global _active
    guard_changes = {k: changes.pop(k) for k in list(changes) if k in _GUARD_FIELDS}
    updated = replace(get_config(), **changes)
    if guard_changes:
        updated = replace(updated, guards=replace(updated.guards, **guard_changes))
    _active = updated
    return _active


@contextmanager
def use_config(config: LabConfig) -> Iterator[LabConfig]:
    global _active
    saved = _active
    _active = config
    try:
        yield config
    finally:
        _active = saved
