"""Scalar gauge functions, cone self-maps, and their grid/sample validation.

Scalar gauges are functions phi: [0, inf) -> [0, inf) used as contraction
moduli. The class conditions

    Phi  : phi(0) = 0, phi(t) < t for t > 0, t - phi(t) -> inf
    Phi1 : Phi + nondecreasing + limsup_{s -> r+} phi(s) < r
    Phi2 : Phi + limsup_{s -> r} phi(s) < r

are analytic and cannot be decided numerically. ``validate_gauge`` checks
grid surrogates of each clause; a pass means "consistent with the class",
never "in the class".

Cone gauges psi: P -> P play the same role for cone-valued distances and
collapse to scalar gauges through phi(t) = ||psi(t e)||_e.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import cones
from .common import ValidationReport, make_rng
from .cones import SolidCone
from .errors import DimensionError, DomainError, NumericalError
from .scalarization import _norm

CLASSES = ("Phi", "Phi1", "Phi2")

DEFAULT_GRID = np.logspace(-6, 6, 64)
GROWTH_TARGET = 1e3
# limsup surrogate: windows r*10**-4, r*10**-5, ..., r*10**-13
LIMSUP_DECADES = range(4, 14)
WINDOW_POINTS = 4

R0_TOL = 1e-12
R0_TAIL = np.concatenate([np.logspace(-13, 4, 240), [1e6, 1e9]])
MAX_DOUBLINGS = 60


@dataclass(frozen=True, eq=False)
class GaugeFunction:
    fn: Callable[[float], float]
    declared_class: str = "Phi2"
    name: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.declared_class not in CLASSES:
            raise DomainError(f"declared_class must be one of {CLASSES}")

    def __call__(self, t: float) -> float:
        return eval_gauge(self, t)

    def to_json(self) -> dict:
        if self.name in ("linear", "saturating"):
            return {"kind": self.name, **self.params}
        return {"kind": self.name}


def linear(k: float) -> GaugeFunction:
    """phi(t) = k t, 0 <= k < 1 (k >= 1 is accepted so negative controls can be built)."""
    k = float(k)
    if k < 0:
        raise DomainError("linear gauge needs k >= 0")
    return GaugeFunction(lambda t: k * t, "Phi1", "linear", {"k": k})


def saturating() -> GaugeFunction:
    """phi(t) = t / (1 + t)."""
    return GaugeFunction(lambda t: t / (1.0 + t), "Phi1", "saturating")


def from_table(ts, values, declared_class: str = "Phi2") -> GaugeFunction:
    """Piecewise-linear gauge through (0, 0) and the given knots.

    Beyond the last knot the final slope is continued.
    """
    ts = np.asarray(ts, dtype=float)
    vs = np.asarray(values, dtype=float)
    if ts.ndim != 1 or ts.shape != vs.shape or ts.size < 2:
        raise DomainError("table gauge needs matching 1-d arrays with at least two knots")
    if np.any(np.diff(ts) <= 0) or ts[0] <= 0 or np.any(vs < 0):
        raise DomainError("table knots must be positive and increasing, values nonnegative")
    xs = np.concatenate([[0.0], ts])
    ys = np.concatenate([[0.0], vs])
    slope = (ys[-1] - ys[-2]) / (xs[-1] - xs[-2])

    def fn(t):
        if t <= xs[-1]:
            return float(np.interp(t, xs, ys))
        return float(ys[-1] + slope * (t - xs[-1]))

    return GaugeFunction(fn, declared_class, "table")


def gauge_from_json(spec: dict) -> GaugeFunction:
    if not isinstance(spec, dict) or "kind" not in spec:
        raise DomainError(f"gauge JSON must have a 'kind', got {spec!r}")
    kind = spec["kind"]
    if kind == "linear":
        if set(spec) - {"kind", "k"} or "k" not in spec:
            raise DomainError("linear gauge JSON is {'kind': 'linear', 'k': <float>}")
        return linear(spec["k"])
    if kind == "saturating":
        if set(spec) - {"kind"}:
            raise DomainError("saturating gauge JSON takes no parameters")
        return saturating()
    if kind == "table":
        return from_table(spec["t"], spec["values"], spec.get("class", "Phi2"))
    raise DomainError(f"unknown gauge kind {kind!r}")


def eval_gauge(g: GaugeFunction, t: float) -> float:
    t = float(t)
    if not t >= 0:
        raise DomainError(f"gauges are defined on [0, inf), got t={t}")
    v = float(g.fn(t))
    if not np.isfinite(v) or v < 0:
        raise DomainError(f"gauge {g.name} returned {v} at t={t}")
    return v


def _window_limsup(g, r: float, one_sided: bool = False) -> float:
    """Smallest window-max of phi around r over shrinking windows."""
    best = np.inf
    for dec in LIMSUP_DECADES:
        h = r * 10.0 ** (-dec)
        offs = h * np.arange(1, WINDOW_POINTS + 1) / WINDOW_POINTS
        pts = list(r + offs) if one_sided else list(r + offs) + list(r - offs)
        best = min(best, max(eval_gauge(g, s) for s in pts))
    return best


def validate_gauge(g: GaugeFunction, grid=None, growth_target: float = GROWTH_TARGET) -> ValidationReport:
    """Grid surrogates for the Phi / Phi1 / Phi2 clauses.

    (a) phi(0) == 0 exactly; (b) phi(t) < t on the grid; (c) t - phi(t)
    increases over the last quarter of the grid and ends above
    ``growth_target``; monotone: phi nondecreasing on consecutive grid
    points; limsup: the window max around each r (two-sided for Phi2,
    right-sided for Phi1) stays below r, windows shrinking from 1e-4 r.
    """
    grid = DEFAULT_GRID if grid is None else np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 4:
        raise DomainError("grid must be a 1-d array with at least 4 points")
    if np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise DomainError("grid must be positive and strictly increasing")
    if grid[0] > 1e-6 * (1 + 1e-9) or grid[-1] < 1e6 * (1 - 1e-9):
        raise DomainError("grid must span at least [1e-6, 1e6]")

    rep = ValidationReport(subject=f"gauge {g.name}")
    vals = np.array([eval_gauge(g, t) for t in grid])
    rep.add("a_zero_at_zero", eval_gauge(g, 0.0) == 0.0)
    below = vals < grid
    rep.add("b_below_identity", bool(below.all()),
            {"first_failure": None if below.all() else float(grid[~below][0])})
    gap = grid - vals
    tail = gap[3 * grid.size // 4:]
    rep.add("c_growth", bool(tail[-1] > tail[0] and tail[-1] > growth_target),
            {"tail_gap_start": float(tail[0]), "tail_gap_end": float(tail[-1]), "target": growth_target})
    monotone = bool(np.all(np.diff(vals) >= 0))
    two = np.array([_window_limsup(g, r) for r in grid])
    right = np.array([_window_limsup(g, r, one_sided=True) for r in grid])
    phi2_ok = bool(np.all(two < grid))
    phi1_ok = bool(np.all(right < grid)) and monotone
    base = rep.checks["a_zero_at_zero"] and rep.checks["b_below_identity"] and rep.checks["c_growth"]

    rep.details["monotone"] = monotone
    rep.details["phi2_margin_min"] = float(np.min((grid - two) / grid))
    rep.details["consistent_with"] = [c for c, ok in
                                      (("Phi", base), ("Phi1", base and phi1_ok), ("Phi2", base and phi2_ok)) if ok]
    if g.declared_class == "Phi1":
        rep.add("monotone", monotone)
        rep.add("limsup_right", bool(np.all(right < grid)))
    elif g.declared_class == "Phi2":
        rep.add("limsup", phi2_ok)
    rep.notes.append("grid surrogates are necessary, not sufficient, for class membership")
    return rep


def compute_r0(g: GaugeFunction, d0: float) -> float:
    """r0 = inf{r : s - phi(s) > d0 for all s > r}.

    The "for all s > r" predicate is evaluated on a dense tail grid
    s = r + max(r, 1) * u, u log-spaced from 1e-13 to 1e9; r0 is bracketed
    by doubling and refined by bisection.
    """
    d0 = float(d0)
    if not d0 >= 0:
        raise DomainError("d0 must be nonnegative")

    def tail_ok(r):
        s = r + max(r, 1.0) * R0_TAIL
        return all(si - eval_gauge(g, si) > d0 for si in s)

    if tail_ok(0.0):
        return 0.0
    lo, hi = 0.0, max(d0, 1.0)
    for _ in range(MAX_DOUBLINGS):
        if tail_ok(hi):
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise NumericalError("compute_r0: t - phi(t) never exceeds d0 (growth clause fails)")
    while hi - lo > R0_TOL * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if tail_ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def majorant(gs) -> GaugeFunction:
    """Pointwise maximum of finitely many gauges.

    Used only for bound diagnostics; the result is not claimed monotone.
    """
    gs = list(gs)
    if not gs:
        raise DomainError("majorant of an empty list")
    if len(gs) == 1:
        return gs[0]
    cls = "Phi2" if all(g.declared_class in ("Phi1", "Phi2") for g in gs) else "Phi"
    names = "max(" + ", ".join(g.name for g in gs) + ")"
    return GaugeFunction(lambda t: max(eval_gauge(g, t) for g in gs), cls, names)


# ---------------------------------------------------------------------------
# cone gauges
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ConeGauge:
    """psi: P -> P in one of three forms: scale, linear operator, custom."""

    cone: SolidCone
    form: str
    k: float | None = None
    matrix: np.ndarray | None = None
    fn: Callable[[np.ndarray], np.ndarray] | None = None
    epsilon: float | None = None

    def __post_init__(self):
        if self.form == "scale":
            if self.k is None or not 0 <= self.k < 1:
                raise DomainError("scale cone gauge needs 0 <= k < 1")
            eps = (1.0 - self.k) / 2 if self.epsilon is None else self.epsilon
        elif self.form == "operator":
            A = np.asarray(self.matrix, dtype=float)
            if A.shape != (self.cone.dim, self.cone.dim):
                raise DimensionError(f"operator must be {self.cone.dim}x{self.cone.dim}, got {A.shape}")
            A.setflags(write=False)
            object.__setattr__(self, "matrix", A)
            eps = self.epsilon
            if eps is None:
                rho = float(np.max(np.abs(np.linalg.eigvals(A))))
                if rho >= 1:
                    raise DomainError("operator with spectral radius >= 1 needs an explicit epsilon")
                eps = (1.0 - rho) / 2
        elif self.form == "custom":
            if self.fn is None:
                raise DomainError("custom cone gauge needs fn")
            if self.epsilon is None:
                raise DomainError("custom cone gauge needs a declared epsilon")
            eps = self.epsilon
        else:
            raise DomainError(f"unknown cone gauge form {self.form!r}")
        if not 0 < eps < 1:
            raise DomainError(f"epsilon must lie in (0, 1), got {eps}")
        object.__setattr__(self, "epsilon", float(eps))

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.form == "scale":
            return self.k * x
        if self.form == "operator":
            return self.matrix @ x
        return np.asarray(self.fn(x), dtype=float)

    def to_json(self) -> dict:
        if self.form == "scale":
            return {"kind": "scale", "k": self.k, "epsilon": self.epsilon}
        if self.form == "operator":
            return {"kind": "operator", "matrix": self.matrix.tolist(), "epsilon": self.epsilon}
        return {"kind": "custom", "epsilon": self.epsilon}


def scale(cone: SolidCone, k: float, epsilon: float | None = None) -> ConeGauge:
    return ConeGauge(cone, "scale", k=float(k), epsilon=epsilon)


def operator(cone: SolidCone, matrix, epsilon: float | None = None) -> ConeGauge:
    return ConeGauge(cone, "operator", matrix=matrix, epsilon=epsilon)


def custom(cone: SolidCone, fn, epsilon: float) -> ConeGauge:
    return ConeGauge(cone, "custom", fn=fn, epsilon=epsilon)


def cone_gauge_from_json(cone: SolidCone, spec: dict) -> ConeGauge:
    if not isinstance(spec, dict) or "kind" not in spec:
        raise DomainError(f"cone gauge JSON must have a 'kind', got {spec!r}")
    kind = spec["kind"]
    if kind == "scale":
        if set(spec) - {"kind", "k", "epsilon"}:
            raise DomainError("unknown fields in scale cone gauge")
        return scale(cone, spec["k"], spec.get("epsilon"))
    if kind == "operator":
        if set(spec) - {"kind", "matrix", "epsilon"}:
            raise DomainError("unknown fields in operator cone gauge")
        return operator(cone, spec["matrix"], spec.get("epsilon"))
    raise DomainError(f"unknown cone gauge kind {kind!r}")


def validate_cone_gauge(psi: ConeGauge, samples: int = 200, rng: np.random.Generator | None = None) -> ValidationReport:
    """psi(0) = 0, psi(P) in P and x - psi(x) interior for sampled interior x."""
    rng = make_rng() if rng is None else rng
    cone = psi.cone
    rep = ValidationReport(subject=f"cone gauge ({psi.form})")
    rep.add("zero_to_zero", bool(np.all(psi(np.zeros(cone.dim)) == 0)))
    bad_p, bad_int = [], []
    for _ in range(samples):
        p = cones.sample_point(cone, rng)
        if not cones._contains(cone, psi(p)):
            bad_p.append(p.tolist())
        x = cones.sample_interior(cone, rng)
        if not cones._interior(cone, x - psi(x)):
            bad_int.append(x.tolist())
    rep.add("maps_P_into_P", not bad_p, {"violations": bad_p[:5]})
    rep.add("I_minus_psi_keeps_interior", not bad_int, {"violations": bad_int[:5]})
    return rep


def psi2_check(psi: ConeGauge, samples: int = 200, seq_len: int = 40,
               rng: np.random.Generator | None = None) -> dict:
    """Sampled Psi2 clause: psi(x_n) <=_P (1 - eps) x eventually.

    For each random interior x a sequence x_n = x + 2**-n * v (v random,
    scaled to keep x_n interior) is generated; the report gives, per
    sample, the first index after which the clause holds up to seq_len.
    """
    rng = make_rng() if rng is None else rng
    cone = psi.cone
    target_scale = 1.0 - psi.epsilon
    indices, failures = [], 0
    for _ in range(samples):
        x = cones.sample_interior(cone, rng)
        v = rng.normal(size=cone.dim) * np.abs(x).max()
        ok = np.array([
            cones._contains(cone, target_scale * x - psi(x + 2.0 ** -n * v)) for n in range(seq_len)
        ])
        if not ok[-1]:
            failures += 1
            indices.append(None)
        else:
            bad = np.flatnonzero(~ok)
            indices.append(0 if bad.size == 0 else int(bad[-1]) + 1)
    finite = [i for i in indices if i is not None]
    return {"samples": samples, "failures": failures, "max_index": max(finite) if finite else None,
            "indices": indices, "epsilon": psi.epsilon, "passed": failures == 0}


def gauge_from_cone_map(cone: SolidCone, e, psi: ConeGauge) -> GaugeFunction:
    """phi(t) = ||psi(t e)||_e, the scalar gauge seen through direction e."""
    e = cones.require_interior(cone, e)
    if psi.cone.dim != cone.dim:
        raise DimensionError("cone gauge and cone disagree on dimension")
    cls = "Phi2"

    def fn(t):
        return _norm(cone, e, psi(t * e))

    name = f"psi_{psi.form}@e"
    return GaugeFunction(fn, cls, name)


def linear_operator_check(cone: SolidCone, A, samples: int = 1000,
                          rng: np.random.Generator | None = None) -> ValidationReport:
    """Sampled checks of the contractive-operator conditions for matrix A.

    A(P) = P and (I - A)(P) = P are only checked as inclusions on samples
    plus invertibility of A and I - A; surjectivity is not verifiable by
    sampling.
    """
    rng = make_rng() if rng is None else rng
    A = np.asarray(A, dtype=float)
    if A.shape != (cone.dim, cone.dim):
        raise DimensionError(f"A must be {cone.dim}x{cone.dim}, got {A.shape}")
    rep = ValidationReport(subject="linear operator")
    I_A = np.eye(cone.dim) - A
    bad_ap, bad_int, bad_ip = [], [], []
    for _ in range(samples):
        p = cones.sample_point(cone, rng)
        if not cones._contains(cone, A @ p):
            bad_ap.append(p.tolist())
        if not cones._contains(cone, I_A @ p):
            bad_ip.append(p.tolist())
        x = cones.sample_interior(cone, rng)
        if not cones._interior(cone, I_A @ x):
            bad_int.append(x.tolist())
    rep.add("A_maps_P_into_P", not bad_ap, {"violations": bad_ap[:5], "count": len(bad_ap)})
    rep.add("I_minus_A_interior", not bad_int, {"violations": bad_int[:5], "count": len(bad_int)})
    cond_a = float(np.linalg.cond(A))
    cond_ia = float(np.linalg.cond(I_A))
    rep.add("A_invertible", bool(np.isfinite(cond_a) and cond_a < 1e12), {"cond": cond_a, "det": float(np.linalg.det(A))})
    rep.add("I_minus_A_invertible", bool(np.isfinite(cond_ia) and cond_ia < 1e12),
            {"cond": cond_ia, "det": float(np.linalg.det(I_A))})
    rep.details["I_minus_A_maps_P_into_P"] = {"holds_on_samples": not bad_ip, "count": len(bad_ip)}
    rep.notes.append("surjectivity A(P) = P and (I - A)(P) = P is not verifiable by sampling; "
                     "checked as inclusion plus invertibility only")
    return rep
