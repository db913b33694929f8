"""Cone-valued distances, the real metrics d_e = xi_e o d, and order checks.

A :class:`ConeMetricSpace` is a distance oracle ``d(x, y) -> vector in P``
over an opaque point universe. Finite universes list their points; open
universes supply a ``sampler(rng) -> point`` so that axioms can be checked
on random tuples.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from . import cones
from .common import ValidationReport, as_vector, make_rng
from .cones import SolidCone
from .errors import DimensionError, DomainError, TemplateError
from .scalarization import _xi, equivalence_constants

SCALAR_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class ConeMetricSpace:
    cone: SolidCone
    d: Callable[[Any, Any], Any]
    points: Sequence | None = None
    sampler: Callable[[np.random.Generator], Any] | None = None
    same: Callable[[Any, Any], bool] | None = None
    tol: float = 1e-9
    name: str = "cone metric"

    def distance(self, x, y) -> np.ndarray:
        v = as_vector(self.d(x, y), name="d(x, y)")
        if v.shape[0] != self.cone.dim:
            raise DimensionError(f"distance has dimension {v.shape[0]}, cone has {self.cone.dim}")
        return v

    def is_same(self, x, y) -> bool:
        if self.same is not None:
            return bool(self.same(x, y))
        return bool(np.array_equal(np.asarray(x), np.asarray(y)))

    def draw(self, rng: np.random.Generator):
        if self.points is not None:
            return self.points[int(rng.integers(len(self.points)))]
        if self.sampler is None:
            raise DomainError("space has neither a finite point list nor a sampler")
        return self.sampler(rng)


def finite_space(cone: SolidCone, matrix, name: str = "finite cone metric") -> ConeMetricSpace:
    """Space on points 0..n-1 with d given as an n x n x m array."""
    D = np.asarray(matrix, dtype=float)
    if D.ndim != 3 or D.shape[0] != D.shape[1] or D.shape[2] != cone.dim:
        raise DimensionError(f"distance matrix must be n x n x {cone.dim}, got {D.shape}")
    if not np.all(np.isfinite(D)):
        raise DomainError("distance matrix has non-finite entries")
    D.setflags(write=False)
    return ConeMetricSpace(cone, lambda i, j: D[i, j], points=list(range(D.shape[0])),
                           same=lambda i, j: i == j, name=name)


def space_from_json(spec: dict) -> ConeMetricSpace:
    from .cones import cone_from_json

    extra = set(spec) - {"cone", "n_points", "d"}
    if extra:
        raise DomainError(f"unknown metric fields: {sorted(extra)}")
    try:
        cone = cone_from_json(spec["cone"])
        D = spec["d"]
    except KeyError as exc:
        raise DomainError(f"finite cone-metric JSON is missing {exc}") from None
    space = finite_space(cone, D)
    if "n_points" in spec and int(spec["n_points"]) != len(space.points):
        raise DimensionError("n_points disagrees with the distance matrix")
    return space


# -- stock spaces on R^n ------------------------------------------------------

def _gaussian_sampler(n):
    return lambda rng: float(np.exp(rng.normal())) * rng.normal(size=n)


def coordinatewise_space(n: int) -> ConeMetricSpace:
    """R^n with d(x, y) = |x - y| taken coordinatewise, valued in the orthant."""
    return ConeMetricSpace(
        cones.orthant(n), lambda x, y: np.abs(np.asarray(x, float) - np.asarray(y, float)),
        sampler=_gaussian_sampler(n), name=f"coordinatewise |x-y| on R^{n}",
    )


def lorentz_space(n: int) -> ConeMetricSpace:
    """R^n with d(x, y) = (|x - y|, ||x - y||_1) in the Lorentz cone of R^(n+1).

    The triangle defect (|a|+|b|-|a+b|, sum of the same) is Lorentz-positive
    because an l1 norm dominates the l2 norm.
    """
    def d(x, y):
        diff = np.abs(np.asarray(x, float) - np.asarray(y, float))
        return np.append(diff, diff.sum())

    return ConeMetricSpace(cones.lorentz(n + 1), d, sampler=_gaussian_sampler(n),
                           name=f"lorentz-valued metric on R^{n}")


def pushed_space(cone: SolidCone, generators) -> ConeMetricSpace:
    """R^k with d(x, y) = B |x - y|, where the columns of B lie in P.

    B maps the orthant into P, so the orthant axioms carry over.
    """
    B = np.asarray(generators, dtype=float)
    if B.shape[0] != cone.dim:
        raise DimensionError("generators must have the cone's dimension as rows")
    for col in B.T:
        if not cones.contains(cone, col):
            raise DomainError(f"generator {col.tolist()} is not in P")
    k = B.shape[1]
    return ConeMetricSpace(cone, lambda x, y: B @ np.abs(np.asarray(x, float) - np.asarray(y, float)),
                           sampler=_gaussian_sampler(k), name=f"pushed metric R^{k} -> {cone.kind}")


def discrete_space(cone: SolidCone, value=None) -> ConeMetricSpace:
    """d(x, y) = c for x != y and 0 otherwise, c in int P (default: witness)."""
    c = cone.interior_witness if value is None else cones.require_interior(cone, value, "value")
    zero = np.zeros(cone.dim)
    return ConeMetricSpace(cone, lambda x, y: zero if np.array_equal(x, y) else c,
                           sampler=lambda rng: rng.integers(0, 5, size=2).astype(float),
                           name="discrete cone metric")


# -- induced metric -------------------------------------------------------------

@dataclass(eq=False)
class InducedMetric:
    """d_e = xi_e o d, with the full matrix precomputed on finite spaces."""

    base: ConeMetricSpace
    e: np.ndarray
    matrix: np.ndarray | None = field(default=None, repr=False)

    def __call__(self, x, y) -> float:
        if self.matrix is not None and isinstance(x, (int, np.integer)) and isinstance(y, (int, np.integer)):
            return float(self.matrix[x, y])
        return _xi(self.base.cone, self.e, self.base.distance(x, y)).value

    def pairwise(self, pts) -> np.ndarray:
        n = len(pts)
        out = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                out[i, j] = out[j, i] = self(pts[i], pts[j])
        return out


def induced_metric(space: ConeMetricSpace, e) -> InducedMetric:
    e = cones.require_interior(space.cone, e)
    im = InducedMetric(space, e)
    if space.points is not None:
        pts = space.points
        n = len(pts)
        M = np.zeros((n, n))
        for i in range(n):
            for j in range(n):
                M[i, j] = _xi(space.cone, e, space.distance(pts[i], pts[j])).value
        M.setflags(write=False)
        im.matrix = M
    return im


def validate_cone_metric(space: ConeMetricSpace, sample_triples: int = 200,
                         rng: np.random.Generator | None = None) -> ValidationReport:
    """Check identity, P-valuedness, symmetry and the cone triangle inequality.

    Finite spaces with at most 12 points are checked exhaustively; larger
    or open universes are checked on ``sample_triples`` random triples.
    """
    rng = make_rng() if rng is None else rng
    cone, tol = space.cone, space.tol
    if space.points is not None and len(space.points) <= 12:
        pts = space.points
        triples = [(a, b, c) for a in pts for b in pts for c in pts]
    else:
        triples = [(space.draw(rng), space.draw(rng), space.draw(rng)) for _ in range(sample_triples)]

    identity, in_cone, sym, tri = [], [], [], []
    for x, y, z in triples:
        dxx = space.distance(x, x)
        if np.abs(dxx).max() > tol:
            identity.append(("d(x,x) != 0", _show(x)))
        dxy, dyx = space.distance(x, y), space.distance(y, x)
        if not space.is_same(x, y) and np.abs(dxy).max() <= tol:
            identity.append(("d(x,y) = 0 for x != y", _show(x), _show(y)))
        if not cones._contains(cone, dxy):
            in_cone.append((_show(x), _show(y), dxy.tolist()))
        if np.abs(dxy - dyx).max() > tol:
            sym.append((_show(x), _show(y)))
        dxz, dyz = space.distance(x, z), space.distance(y, z)
        if not cones._contains(cone, dxy + dyz - dxz):
            tri.append((_show(x), _show(y), _show(z)))

    rep = ValidationReport(subject=space.name)
    rep.add("identity", not identity, {"violations": identity[:10], "count": len(identity)})
    rep.add("values_in_cone", not in_cone, {"violations": in_cone[:10], "count": len(in_cone)})
    rep.add("symmetry", not sym, {"violations": sym[:10], "count": len(sym)})
    rep.add("triangle", not tri, {"violations": tri[:10], "count": len(tri)})
    rep.details["tuples_checked"] = len(triples)
    return rep


def _show(p):
    if isinstance(p, np.ndarray):
        return p.tolist()
    return p


# -- sequences ------------------------------------------------------------------

def _first_tail(bad: np.ndarray) -> int:
    """Smallest N with bad[N:] all False (len(bad) if bad[-1])."""
    idx = np.flatnonzero(bad)
    return 0 if idx.size == 0 else int(idx[-1]) + 1


def _tails(dm: np.ndarray, dl: np.ndarray | None, eps: float) -> tuple[int, int | None]:
    n = dm.shape[0]
    # row_tail_max[N] = max over m, k >= N of dm[m, k]
    suffix = np.zeros(n)
    running = 0.0
    for i in range(n - 1, -1, -1):
        running = max(running, float(dm[i, i:].max()))
        suffix[i] = running
    cauchy = _first_tail(suffix >= eps)
    limit = None if dl is None else _first_tail(dl >= eps)
    return cauchy, limit


def sequence_analysis(space: ConeMetricSpace, seq: Sequence, e_samples: Sequence, eps: float,
                      limit=None) -> dict:
    """Tail indices of a finite sequence prefix under each d_e.

    For every e the report gives the first index N after which all
    pairwise d_e distances (and, with ``limit``, all distances to the
    limit) are below ``eps``; ``len(seq)`` means "not within the prefix".
    Tails for different e are cross-checked against the sandwich
    lower*d_e0 <= d_e <= upper*d_e0 relative to the first e.
    """
    if len(seq) < 2:
        raise DomainError("sequence_analysis needs at least two points")
    if eps <= 0:
        raise DomainError("eps must be positive")
    es = [cones.require_interior(space.cone, e) for e in e_samples]
    if not es:
        raise DomainError("e_samples is empty")
    n = len(seq)

    def matrices(e):
        dm = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                dm[i, j] = dm[j, i] = _xi(space.cone, e, space.distance(seq[i], seq[j])).value
        dl = None
        if limit is not None:
            dl = np.array([_xi(space.cone, e, space.distance(p, limit)).value for p in seq])
        return dm, dl

    mats = [matrices(e) for e in es]
    per_e = []
    consistent = True
    dm0, dl0 = mats[0]
    for e, (dm, dl) in zip(es, mats):
        cauchy, lim = _tails(dm, dl, eps)
        lower, upper = equivalence_constants(space.cone, es[0], e)
        # tail_e0(eps/lower) <= tail_e(eps) <= tail_e0(eps/upper)
        c_hi, l_hi = _tails(dm0, dl0, eps / upper)
        c_lo, l_lo = _tails(dm0, dl0, eps / lower)
        ok = c_lo <= cauchy <= c_hi
        if lim is not None:
            ok = ok and l_lo <= lim <= l_hi
        consistent &= ok
        per_e.append({
            "e": e.tolist(), "cauchy_tail": cauchy, "limit_tail": lim,
            "constants": [lower, upper], "cauchy_tail_bounds": [c_lo, c_hi],
            "limit_tail_bounds": None if lim is None else [l_lo, l_hi], "consistent": ok,
        })
    return {"length": n, "eps": eps, "per_e": per_e, "consistent": bool(consistent)}


# -- order ----------------------------------------------------------------------

def default_e_samples(cone: SolidCone, n: int = 16, rng: np.random.Generator | None = None) -> list[np.ndarray]:
    """The interior witness followed by n-1 random interior points."""
    rng = make_rng() if rng is None else rng
    return [cone.interior_witness.copy()] + [cones.sample_interior(cone, rng) for _ in range(n - 1)]


def order_check(cone: SolidCone, x, y, e_samples: Sequence | None = None, samples: int = 16,
                rng: np.random.Generator | None = None) -> dict:
    """Compare x <=_P y by membership and by xi_e(x) <= xi_e(y) over sampled e."""
    x = cones._checked(cone, x, "x")
    y = cones._checked(cone, y, "y")
    if not cones._contains(cone, x) or not cones._contains(cone, y):
        raise DomainError("order_check requires x and y in P")
    if e_samples is None:
        e_samples = default_e_samples(cone, samples, rng)
    es = [cones.require_interior(cone, e) for e in e_samples]
    by_membership = cones._contains(cone, y - x)
    failing = [e.tolist() for e in es if _xi(cone, e, x).value > _xi(cone, e, y).value + SCALAR_TOL]
    by_scalar = not failing
    out = {"leq_membership": bool(by_membership), "leq_scalarized": bool(by_scalar),
           "e_count": len(es), "witness_e": failing[:3]}
    if by_membership and not by_scalar:
        out["status"] = "order_mismatch"
    elif by_scalar and not by_membership:
        out["status"] = "insufficient_sampling"
    else:
        out["status"] = "agree"
    return out


def sum_direction_diagnostic(space: ConeMetricSpace, e1, e2, x, y) -> dict:
    """d_{e1}, d_{e2} and d_{e1+e2} at one pair; no relation is asserted."""
    e1 = cones.require_interior(space.cone, e1, "e1")
    e2 = cones.require_interior(space.cone, e2, "e2")
    v = space.distance(x, y)
    return {
        "d_e1": _xi(space.cone, e1, v).value,
        "d_e2": _xi(space.cone, e2, v).value,
        "d_e1_plus_e2": _xi(space.cone, e1 + e2, v).value,
    }


# -- inequality templates ---------------------------------------------------------

@dataclass(frozen=True)
class DTerm:
    """coef * d(left, right); each argument is (map name or None, 'x' | 'y')."""

    coef: float
    left: tuple[str | None, str]
    right: tuple[str | None, str]


_ARG = re.compile(r"^\s*(?:([A-Za-z_]\w*?)\s*(?:\(\s*([xy])\s*\)|([xy]))|([xy]))\s*$")
_TERM = re.compile(r"^\s*(?:([0-9.eE+-]+)\s*\*?\s*)?d\s*\((.*)\)\s*$")


def _parse_arg(text: str) -> tuple[str | None, str]:
    m = _ARG.match(text)
    if not m:
        raise TemplateError(f"cannot parse d-argument {text!r}")
    if m.group(4):
        return None, m.group(4)
    return m.group(1), m.group(2) or m.group(3)


def parse_side(text: str) -> list[DTerm]:
    """Parse e.g. ``"0.5*d(x,y) + 0.2*d(x, fx)"`` into DTerms."""
    if not isinstance(text, str) or not text.strip():
        raise TemplateError("empty template side")
    terms = []
    for chunk in re.split(r"(?<![eE])\+(?![^()]*\))", text):
        m = _TERM.match(chunk)
        if not m:
            raise TemplateError(f"cannot parse term {chunk.strip()!r}")
        coef_txt, inner = m.group(1), m.group(2)
        try:
            coef = 1.0 if coef_txt is None else float(coef_txt)
        except ValueError:
            raise TemplateError(f"bad coefficient {coef_txt!r}") from None
        if not np.isfinite(coef) or coef < 0:
            raise TemplateError(f"coefficients must be finite and nonnegative, got {coef}")
        parts = inner.split(",")
        if len(parts) != 2:
            raise TemplateError(f"d takes two arguments: {chunk.strip()!r}")
        terms.append(DTerm(coef, _parse_arg(parts[0]), _parse_arg(parts[1])))
    return terms


def _as_terms(side) -> list[DTerm]:
    if isinstance(side, str):
        return parse_side(side)
    terms = list(side)
    if not terms or not all(isinstance(t, DTerm) for t in terms):
        raise TemplateError("template side must be a string or a non-empty list of DTerm")
    for t in terms:
        if t.coef < 0:
            raise TemplateError("coefficients must be nonnegative")
    return terms


def _eval_side(space, terms, maps, x, y, e=None):
    pts = {"x": x, "y": y}

    def arg(a):
        fname, var = a
        if fname is None:
            return pts[var]
        if fname not in maps:
            raise TemplateError(f"template uses unknown map {fname!r}")
        return maps[fname](pts[var])

    vec = np.zeros(space.cone.dim)
    subst = 0.0
    for t in terms:
        v = space.distance(arg(t.left), arg(t.right))
        vec = vec + t.coef * v
        if e is not None:
            subst += t.coef * _xi(space.cone, e, v).value
    return vec, subst


def check_condition_translation(space: ConeMetricSpace, lhs_terms, rhs_terms, maps: dict | None = None,
                                sample_pairs: int = 200, e_samples: Sequence | None = None,
                                rng: np.random.Generator | None = None) -> dict:
    """Compare a cone inequality A <=_P B with its scalarized readings.

    For each sampled pair (x, y), x != y, A and B are evaluated as vectors
    in P. Three readings are recorded: membership (B - A in P),
    scalarized (xi_e(A) <= xi_e(B) for every e) and substituted (each d
    replaced by d_e term by term). The forward implication
    membership => scalarized must have zero violations.
    """
    rng = make_rng() if rng is None else rng
    maps = maps or {}
    lhs, rhs = _as_terms(lhs_terms), _as_terms(rhs_terms)
    for side in (lhs, rhs):
        for t in side:
            for fname, _ in (t.left, t.right):
                if fname is not None and fname not in maps:
                    raise TemplateError(f"template uses unknown map {fname!r}")
    if e_samples is None:
        e_samples = default_e_samples(space.cone, 16, rng)
    es = [cones.require_interior(space.cone, e) for e in e_samples]

    counts = dict(membership_violations=0, scalarized_violations=0, substituted_violations=0,
                  forward_violations=0, reverse_violations=0)
    examples = []
    pairs = 0
    attempts = 0
    while pairs < sample_pairs and attempts < 20 * sample_pairs:
        attempts += 1
        x, y = space.draw(rng), space.draw(rng)
        if space.is_same(x, y):
            continue
        pairs += 1
        A, _ = _eval_side(space, lhs, maps, x, y)
        B, _ = _eval_side(space, rhs, maps, x, y)
        member = cones._contains(space.cone, B - A)
        scal_ok = all(_xi(space.cone, e, A).value <= _xi(space.cone, e, B).value + SCALAR_TOL for e in es)
        subst_ok = True
        for e in es:
            _, sa = _eval_side(space, lhs, maps, x, y, e)
            _, sb = _eval_side(space, rhs, maps, x, y, e)
            if sa > sb + SCALAR_TOL:
                subst_ok = False
                break
        counts["membership_violations"] += not member
        counts["scalarized_violations"] += not scal_ok
        counts["substituted_violations"] += not subst_ok
        if member and not scal_ok:
            counts["forward_violations"] += 1
            examples.append({"x": _show(x), "y": _show(y), "kind": "forward"})
        if scal_ok and not member:
            counts["reverse_violations"] += 1
            examples.append({"x": _show(x), "y": _show(y), "kind": "reverse"})
    return {"pairs": pairs, "e_count": len(es), **counts, "examples": examples[:5],
            "forward_holds": counts["forward_violations"] == 0}
