"""The scalarization xi_e(y) = inf{t : t*e - y in P} and the norms it induces.

``xi`` uses a closed form where one exists (orthant for any interior e,
Lorentz for e on the cone axis) and otherwise brackets the infimum by
doubling and bisects on the monotone predicate ``t*e - y in P``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from . import cones
from .cones import SolidCone
from .errors import DomainError, NumericalError

TOL_BISECT = 1e-12
MAX_BISECT = 200
MAX_DOUBLINGS = 60


@dataclass(frozen=True)
class ScalarizationResult:
    value: float
    bracket_lo: float
    bracket_hi: float
    iterations: int
    method: str

    def to_json(self) -> dict:
        return asdict(self)


def _bracket(cone: SolidCone, e: np.ndarray, y: np.ndarray, member=None) -> tuple[float, float]:
    if not np.any(y):
        return 0.0, 0.0
    if member is None:
        member = cones.ray_predicate(cone, e, y)
    if not member(1.0):
        lo, t = 1.0, 2.0
        for _ in range(MAX_DOUBLINGS):
            if member(t):
                return lo, t
            lo, t = t, 2.0 * t
    else:
        hi, t = 1.0, -1.0
        for _ in range(MAX_DOUBLINGS):
            if not member(t):
                return t, hi
            hi, t = t, 2.0 * t
    raise NumericalError(f"bracket: doubling exhausted after 2**{MAX_DOUBLINGS} (y={y.tolist()})")


def bracket(cone: SolidCone, e, y) -> tuple[float, float]:
    """Doubling walk t = 1, 2, 4, ... (or 1, -1, -2, -4, ...) around xi_e(y).

    Returns (lo, hi) with ``lo*e - y`` outside P and ``hi*e - y`` inside,
    except for y = 0 where both are 0.
    """
    e = cones.require_interior(cone, e)
    y = cones._checked(cone, y, "y")
    return _bracket(cone, e, y)


def _bisect(cone, e, y, tol=TOL_BISECT, max_iter=MAX_BISECT) -> ScalarizationResult:
    member = cones.ray_predicate(cone, e, y)
    lo, hi = _bracket(cone, e, y, member)
    if lo == hi:
        return ScalarizationResult(lo, lo, hi, 0, "bisection")
    it = 0
    while hi - lo > tol * max(1.0, abs(0.5 * (lo + hi))):
        if it >= max_iter:
            raise NumericalError(f"bisection did not reach tolerance in {max_iter} steps")
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if member(mid):
            hi = mid
        else:
            lo = mid
        it += 1
    return ScalarizationResult(0.5 * (lo + hi), lo, hi, it, "bisection")


def _closed_form(cone: SolidCone, e: np.ndarray, y: np.ndarray) -> float | None:
    if cone.kind == "orthant":
        return float(np.max(y / e))
    if cone.kind == "lorentz":
        if cone.dim == 1:
            return float(y[0] / e[0])
        if not np.any(e[:-1]):
            return float((y[-1] + np.linalg.norm(y[:-1])) / e[-1])
    return None


def xi(cone: SolidCone, e, y, method: str = "auto", tol: float = TOL_BISECT) -> ScalarizationResult:
    """Scalarize ``y`` along the interior direction ``e``.

    ``method`` is ``"auto"`` (closed form when available), ``"closed"``
    (closed form or DomainError) or ``"bisection"`` (always the generic path).
    """
    e = cones.require_interior(cone, e)
    y = cones._checked(cone, y, "y")
    return _xi(cone, e, y, method, tol)


def _xi(cone, e, y, method="auto", tol=TOL_BISECT) -> ScalarizationResult:
    if method not in ("auto", "closed", "bisection"):
        raise DomainError(f"unknown method {method!r}")
    if method != "bisection":
        v = _closed_form(cone, e, y)
        if v is not None:
            v = v + 0.0  # normalise -0.0
            return ScalarizationResult(v, v, v, 0, "closed_form")
        if method == "closed":
            raise DomainError(f"no closed form for a {cone.kind} cone with e={e.tolist()}")
    return _bisect(cone, e, y, tol)


def xi_value(cone: SolidCone, e, y) -> float:
    return xi(cone, e, y).value


def norm_e(cone: SolidCone, e, x, method: str = "auto") -> float:
    """||x||_e = max(|xi_e(x)|, |xi_e(-x)|)."""
    e = cones.require_interior(cone, e)
    x = cones._checked(cone, x, "x")
    return _norm(cone, e, x, method)


def _norm(cone, e, x, method="auto") -> float:
    return max(abs(_xi(cone, e, x, method).value), abs(_xi(cone, e, -x, method).value))


def equivalence_constants(cone: SolidCone, e, e2) -> tuple[float, float]:
    """Best constants with lower*||x||_e <= ||x||_e2 <= upper*||x||_e.

    lower = 1/xi_e(e2), upper = xi_e2(e).
    """
    e = cones.require_interior(cone, e, "e")
    e2 = cones.require_interior(cone, e2, "e2")
    return 1.0 / _xi(cone, e, e2).value, _xi(cone, e2, e).value
