"""Solid cones in R^m with tolerance-aware membership and order oracles.

Three families are supported:

* ``orthant``    -- {x : x_i >= 0}
* ``lorentz``    -- {(xbar, t) : t >= ||xbar||_2}, last coordinate is t
* ``polyhedral`` -- {x : <a_i, x> >= 0 for every normal a_i}

Every defining inequality is evaluated as a *slack* (normalised for the
polyhedral case), and membership compares the smallest slack against an
absolute tolerance ``tau = tol_membership * max(1, ||x||_inf)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .common import ValidationReport, as_vector, make_rng
from .errors import DimensionError, DomainError, NotInteriorError, NumericalError

KINDS = ("orthant", "lorentz", "polyhedral")

# find_scale walks n = 1, 2, 4, ..., 2**MAX_DOUBLINGS
MAX_DOUBLINGS = 60


@dataclass(frozen=True, eq=False)
class SolidCone:
    kind: str
    dim: int
    normals: np.ndarray | None = None
    interior_witness: np.ndarray | None = None
    tol_membership: float = 1e-12
    _unit_normals: np.ndarray | None = field(default=None, init=False, repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown cone kind {self.kind!r}; expected one of {KINDS}")
        if int(self.dim) < 1:
            raise DomainError(f"cone dimension must be positive, got {self.dim}")
        if self.tol_membership < 0:
            raise DomainError("tol_membership must be nonnegative")
        object.__setattr__(self, "dim", int(self.dim))
        if self.kind == "polyhedral":
            if self.normals is None or self.interior_witness is None:
                raise DomainError("polyhedral cones need normals and an interior_witness")
            a = np.atleast_2d(np.asarray(self.normals, dtype=float))
            if a.shape[1] != self.dim or not np.all(np.isfinite(a)):
                raise DimensionError(f"normals must be a finite k x {self.dim} array")
            norms = np.linalg.norm(a, axis=1)
            if np.any(norms == 0):
                raise DomainError("zero normal vector")
            a.setflags(write=False)
            unit = a / norms[:, None]
            unit.setflags(write=False)
            object.__setattr__(self, "normals", a)
            object.__setattr__(self, "_unit_normals", unit)
        else:
            object.__setattr__(self, "normals", None)
        w = self.interior_witness
        if self.kind == "orthant":
            w = np.ones(self.dim)
        elif self.kind == "lorentz":
            w = np.zeros(self.dim)
            w[-1] = 1.0
        w = _checked(self, w, "interior_witness")
        w.setflags(write=False)
        object.__setattr__(self, "interior_witness", w)
        if not interior_contains(self, w):
            raise NotInteriorError(f"interior witness {w} is not strictly interior")

    @property
    def witness(self) -> np.ndarray:
        return self.interior_witness

    def to_json(self) -> dict:
        if self.kind == "polyhedral":
            out = {
                "kind": "polyhedral",
                "normals": self.normals.tolist(),
                "interior_witness": self.interior_witness.tolist(),
            }
        else:
            out = {"kind": self.kind, "dim": self.dim}
        if self.tol_membership != 1e-12:
            out["tol_membership"] = self.tol_membership
        return out


def orthant(dim: int, tol: float = 1e-12) -> SolidCone:
    return SolidCone("orthant", dim, tol_membership=tol)


def lorentz(dim: int, tol: float = 1e-12) -> SolidCone:
    return SolidCone("lorentz", dim, tol_membership=tol)


def polyhedral(normals, interior_witness, tol: float = 1e-12) -> SolidCone:
    a = np.atleast_2d(np.asarray(normals, dtype=float))
    return SolidCone(
        "polyhedral", a.shape[1], normals=a,
        interior_witness=np.asarray(interior_witness, dtype=float), tol_membership=tol,
    )


def cone_from_json(spec: dict) -> SolidCone:
    """Build a cone from its JSON encoding (see README for the shapes)."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise DomainError(f"cone JSON must be an object with a 'kind' field, got {spec!r}")
    kind = str(spec["kind"]).lower()
    tol = float(spec.get("tol_membership", 1e-12))
    allowed = {"kind", "tol_membership"}
    if kind in ("orthant", "lorentz"):
        allowed |= {"dim"}
        _reject_unknown(spec, allowed)
        if "dim" not in spec:
            raise DomainError(f"{kind} cone JSON needs 'dim'")
        return SolidCone(kind, int(spec["dim"]), tol_membership=tol)
    if kind == "polyhedral":
        allowed |= {"normals", "interior_witness", "dim"}
        _reject_unknown(spec, allowed)
        if "normals" not in spec or "interior_witness" not in spec:
            raise DomainError("polyhedral cone JSON needs 'normals' and 'interior_witness'")
        cone = polyhedral(spec["normals"], spec["interior_witness"], tol=tol)
        if "dim" in spec and int(spec["dim"]) != cone.dim:
            raise DimensionError("'dim' disagrees with the normals")
        return cone
    raise DomainError(f"unknown cone kind {kind!r}")


def _reject_unknown(spec, allowed):
    extra = set(spec) - allowed
    if extra:
        raise DomainError(f"unknown cone fields: {sorted(extra)}")


def _checked(cone: SolidCone, x, name: str = "x") -> np.ndarray:
    arr = as_vector(x, name=name)
    if arr.shape[0] != cone.dim:
        raise DimensionError(f"{name} has dimension {arr.shape[0]}, cone has {cone.dim}")
    return arr


def slack(cone: SolidCone, x: np.ndarray) -> float:
    """Smallest (normalised) slack of the defining inequalities at ``x``.

    No validation; hot loops call this directly on trusted arrays.
    """
    if cone.kind == "orthant":
        return float(x.min())
    if cone.kind == "lorentz":
        if cone.dim == 1:
            return float(x[0])
        return float(x[-1] - np.linalg.norm(x[:-1]))
    return float((cone._unit_normals @ x).min())


def _tau(cone: SolidCone, x: np.ndarray) -> float:
    return cone.tol_membership * max(1.0, float(np.abs(x).max()))


def _contains(cone: SolidCone, x: np.ndarray) -> bool:
    return slack(cone, x) >= -_tau(cone, x)


def _interior(cone: SolidCone, x: np.ndarray) -> bool:
    return slack(cone, x) > _tau(cone, x)


def ray_predicate(cone: SolidCone, e: np.ndarray, y: np.ndarray):
    """Fast closure t -> [t*e - y in P], same test as ``_contains(cone, t*e - y)``
    up to rounding.

    Precomputes the slack data once so that bisection steps run on plain
    floats.
    """
    tol = cone.tol_membership
    el, yl = e.tolist(), y.tolist()

    def tau(t):
        return tol * max(1.0, max(abs(t * a - b) for a, b in zip(el, yl)))

    if cone.kind == "polyhedral":
        ae = (cone._unit_normals @ e).tolist()
        ay = (cone._unit_normals @ y).tolist()
        return lambda t: min(t * a - b for a, b in zip(ae, ay)) >= -tau(t)
    if cone.kind == "orthant":
        return lambda t: min(t * a - b for a, b in zip(el, yl)) >= -tau(t)
    return lambda t: _contains(cone, t * e - y)


def contains(cone: SolidCone, x) -> bool:
    """x in P, up to ``tol_membership`` slack."""
    return _contains(cone, _checked(cone, x))


def interior_contains(cone: SolidCone, x) -> bool:
    """x in int P: every defining inequality holds with a strict margin."""
    return _interior(cone, _checked(cone, x))


def leq(cone: SolidCone, x, y) -> bool:
    """x <=_P y, i.e. y - x in P."""
    return _contains(cone, _checked(cone, y, "y") - _checked(cone, x, "x"))


def strictly_less(cone: SolidCone, x, y) -> bool:
    """x <<_P y, i.e. y - x in int P."""
    return _interior(cone, _checked(cone, y, "y") - _checked(cone, x, "x"))


def require_interior(cone: SolidCone, e, name: str = "e") -> np.ndarray:
    arr = _checked(cone, e, name)
    if not _interior(cone, arr):
        raise NotInteriorError(f"{name}={arr.tolist()} is not an interior point of the {cone.kind} cone")
    return arr


def find_scale(cone: SolidCone, c, e) -> float:
    """Return delta = 1/n, n the first power of two with delta*c << e."""
    c = require_interior(cone, c, "c")
    e = require_interior(cone, e, "e")
    n = 1.0
    for _ in range(MAX_DOUBLINGS + 1):
        if _interior(cone, e - c / n):
            return 1.0 / n
        n *= 2.0
    raise NumericalError(f"find_scale: schedule exhausted at n = 2**{MAX_DOUBLINGS}")


# ---------------------------------------------------------------------------
# random sampling
# ---------------------------------------------------------------------------

def sample_point(cone: SolidCone, rng: np.random.Generator, boundary_prob: float = 0.2) -> np.ndarray:
    """Random element of P; lands on the boundary with probability ~boundary_prob."""
    m = cone.dim
    scale = float(np.exp(rng.normal(0.0, 1.0)))
    on_boundary = rng.random() < boundary_prob
    if cone.kind == "orthant":
        x = rng.exponential(size=m)
        if on_boundary:
            x[rng.integers(m)] = 0.0
    elif cone.kind == "lorentz":
        x = np.empty(m)
        x[:-1] = rng.normal(size=m - 1)
        r = float(np.linalg.norm(x[:-1]))
        x[-1] = r if on_boundary else r + rng.exponential()
    else:
        # smallest a with a*w + g in P, then push inward
        g = rng.normal(size=m)
        a_g = cone._unit_normals @ g
        a_w = cone._unit_normals @ cone.interior_witness
        a = max(0.0, float(np.max(-a_g / a_w)))
        if not on_boundary:
            a += rng.exponential()
        x = a * cone.interior_witness + g
        if not _contains(cone, x):
            # roundoff on the boundary
            x = x + 1e-12 * max(1.0, float(np.abs(x).max())) * cone.interior_witness
    return scale * x


def sample_interior(cone: SolidCone, rng: np.random.Generator) -> np.ndarray:
    """Random interior point: a P-sample plus a positive multiple of the witness."""
    x = sample_point(cone, rng)
    s = float(np.exp(rng.normal(0.0, 0.75)))
    out = x + s * cone.interior_witness
    while not _interior(cone, out):
        s *= 2.0
        out = x + s * cone.interior_witness
    return out


def sample_vector(cone: SolidCone, rng: np.random.Generator) -> np.ndarray:
    """Unconstrained random vector of the cone's dimension (log-normal scale)."""
    return float(np.exp(rng.normal(0.0, 1.0))) * rng.normal(size=cone.dim)


# ---------------------------------------------------------------------------
# axiom validation
# ---------------------------------------------------------------------------

def validate(cone: SolidCone, n_pairs: int = 1000, rng: np.random.Generator | None = None) -> ValidationReport:
    """Check the cone axioms: pointedness, solidity, sampled closure."""
    rng = make_rng() if rng is None else rng
    rep = ValidationReport(subject=f"{cone.kind} cone, dim {cone.dim}")

    if cone.kind == "polyhedral":
        rank = int(np.linalg.matrix_rank(cone.normals))
        rep.add("pointedness", rank == cone.dim, {"rank": rank, "dim": cone.dim})
    else:
        rep.add("pointedness", True, "structural")

    rep.add("solidity", bool(_interior(cone, cone.interior_witness)),
            {"witness": cone.interior_witness.tolist()})

    bad_add, bad_scale = [], []
    for _ in range(n_pairs):
        x, y = sample_point(cone, rng), sample_point(cone, rng)
        lam = float(rng.exponential())
        if not _contains(cone, x + y):
            bad_add.append((x.tolist(), y.tolist()))
        if not _contains(cone, lam * x):
            bad_scale.append((lam, x.tolist()))
    rep.add("closure_addition", not bad_add, {"violations": bad_add[:5], "samples": n_pairs})
    rep.add("closure_scaling", not bad_scale, {"violations": bad_scale[:5], "samples": n_pairs})
    if cone.kind == "polyhedral" and not rep.checks["pointedness"]:
        rep.notes.append("normals do not span R^m: P contains a line, so P and -P meet outside 0")
    return rep
