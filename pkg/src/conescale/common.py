"""Small shared pieces: vector coercion, seeded generators, validation reports."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import DomainError

DEFAULT_SEED = 42
SEED_ENV = "CONESCALE_SEED"


def as_vector(x, dim: int | None = None, name: str = "vector") -> np.ndarray:
    """Coerce ``x`` to a finite 1-d float array.

    Raises DomainError on NaN/inf entries or on a non-1-d shape. The
    ``dim`` argument is checked by callers that know the cone, since a
    mismatch there is a DimensionError rather than a DomainError.
    """
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise DomainError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} has non-finite entries: {arr}")
    return arr


def make_rng(seed: int | None = None) -> np.random.Generator:
    """Seeded generator on the Philox 4x64 counter-based bit generator.

    ``seed=None`` resolves through $CONESCALE_SEED, then DEFAULT_SEED.
    """
    if seed is None:
        seed = resolve_seed(None)
    return np.random.Generator(np.random.Philox(int(seed)))


def resolve_seed(seed: int | None) -> int:
    env = os.environ.get(SEED_ENV)
    if env is not None and env.strip():
        return int(env)
    return DEFAULT_SEED if seed is None else int(seed)


@dataclass
class ValidationReport:
    """Named pass/fail checks plus free-form details.

    Failures are recorded, never raised. ``passed`` is the conjunction of
    all checks.
    """

    subject: str
    checks: dict[str, bool] = field(default_factory=dict)
    details: dict[str, Any] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def add(self, name: str, ok: bool, detail: Any = None) -> bool:
        self.checks[name] = bool(ok)
        if detail is not None:
            self.details[name] = detail
        return bool(ok)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    @property
    def failed(self) -> list[str]:
        return [k for k, v in self.checks.items() if not v]

    def to_dict(self) -> dict:
        return {
            "subject": self.subject,
            "passed": self.passed,
            "checks": dict(self.checks),
            "details": _jsonable(self.details),
            "notes": list(self.notes),
        }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


jsonable = _jsonable
