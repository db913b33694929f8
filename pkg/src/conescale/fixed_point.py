"""Jungck iteration for a pair f, g: X -> Y with a five-gauge contraction check.

The iteration picks x_{n+1} with g(x_{n+1}) = f(x_n) through a
caller-supplied preimage selector and stops once consecutive images
f(x_n), f(x_{n+1}) are closer than ``tol_conv``. Along the way every
consecutive pair (x_n, x_{n+1}) is tested against

    d(fx, fy) <= max{phi1(d(gx, gy)), phi2(d(gx, fx)), phi3(d(gy, fy)),
                     phi4(d(gx, fy)), phi5(d(fx, gy))}

The solver is a checker, not a prover: an empty violation list means no
counterexample was observed on the orbit.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Any, Callable, NamedTuple, Sequence

import numpy as np
from scipy.spatial.distance import pdist

from . import cones
from .cone_metric import ConeMetricSpace, induced_metric
from .errors import DomainError, NonConvergence, NotInteriorError, RangeInclusionError
from .gauges import ConeGauge, GaugeFunction, compute_r0, eval_gauge, gauge_from_cone_map, majorant

TRAJECTORY_CAP = 4096
VIOLATION_RTOL = 1e-9
VIOLATION_ATOL = 1e-14
# orbit pairs (x_{n-lag}, x_n) checked against the contraction bound
CHECK_LAGS = (1, 2, 4, 8, 16, 32, 64)


class Violation(NamedTuple):
    """Pair (x_n, x_{n+lag}) with d(f x_n, f x_{n+lag}) = lhs > rhs = gauge bound."""

    n: int
    lhs: float
    rhs: float
    lag: int = 1


@dataclass
class JungckProblem:
    metric: Callable[[Any, Any], float]
    f: Callable
    g: Callable
    g_preimage: Callable
    gauges: Sequence[GaugeFunction]
    x0: Any
    tol_conv: float = 1e-10
    max_iter: int = 10_000
    weakly_compatible: bool = False
    self_map: bool = False  # X = Y

    def __post_init__(self):
        if len(self.gauges) != 5:
            raise DomainError(f"need exactly five gauges, got {len(self.gauges)}")
        if self.tol_conv <= 0 or self.max_iter < 1:
            raise DomainError("tol_conv must be positive and max_iter at least 1")


@dataclass
class SolveReport:
    converged: bool
    iterations: int
    trajectory_gaps: list[float]
    limit: Any
    coincidence_argument: Any
    coincidence_residual: float
    d0: float
    r0_bound: float
    observed_orbit_diameter: float
    contraction_violations: list[Violation]
    fixed_point_residual: float | None = None
    commutation_residual: float | None = None
    orbit: list = field(default_factory=list, repr=False)
    orbit_offset: int = 0
    tvs_violations: list[tuple[int, int, list, list]] | None = None
    check_disagreements: list[tuple[int, int]] | None = None
    notes: list[str] = field(default_factory=list)
    metric: Callable | None = field(default=None, repr=False)

    @property
    def status(self) -> str:
        return "converged" if self.converged else "non_convergence"

    def to_json(self) -> dict:
        out = {
            "status": self.status,
            "converged": self.converged,
            "iterations": self.iterations,
            "limit": _plain(self.limit),
            "coincidence_argument": _plain(self.coincidence_argument),
            "coincidence_residual": self.coincidence_residual,
            "d0": self.d0,
            "r0_bound": self.r0_bound,
            "observed_orbit_diameter": self.observed_orbit_diameter,
            "contraction_violations": [v._asdict() for v in self.contraction_violations],
            "fixed_point_residual": self.fixed_point_residual,
            "commutation_residual": self.commutation_residual,
            "trajectory_gaps": list(self.trajectory_gaps),
            "notes": list(self.notes),
        }
        if self.tvs_violations is not None:
            out["tvs_violations"] = [
                {"n": n, "lag": lag, "lhs": lhs, "candidates": cands} for n, lag, lhs, cands in self.tvs_violations
            ]
            out["check_disagreements"] = [list(t) for t in self.check_disagreements]
        return out


def _plain(x):
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, np.generic):
        return x.item()
    return x


def _preimage(p: JungckProblem, y):
    try:
        x = p.g_preimage(y)
    except Exception as exc:  # selector failure is the range-inclusion signal
        raise RangeInclusionError(f"no g-preimage found for {_plain(y)}: {exc}") from exc
    if x is None:
        raise RangeInclusionError(f"no g-preimage found for {_plain(y)}")
    return x


def _diameter(metric, pts) -> float:
    n = len(pts)
    if n < 2:
        return 0.0
    if hasattr(metric, "diameter"):
        return float(metric.diameter(pts))
    if hasattr(metric, "pairwise"):
        return float(np.max(metric.pairwise(pts)))
    best = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            best = max(best, metric(pts[i], pts[j]))
    return best


def contraction_bound(p: JungckProblem, x, y, fx=None, fy=None, gx=None, gy=None) -> float:
    d = p.metric
    fx = p.f(x) if fx is None else fx
    fy = p.f(y) if fy is None else fy
    gx = p.g(x) if gx is None else gx
    gy = p.g(y) if gy is None else gy
    args = (d(gx, gy), d(gx, fx), d(gy, fy), d(gx, fy), d(fx, gy))
    return max(eval_gauge(phi, a) for phi, a in zip(p.gauges, args))


def jungck_solve(p: JungckProblem, strict: bool = False, pair_hook: Callable | None = None) -> SolveReport:
    """Run the Jungck iteration from ``p.x0`` and diagnose the orbit.

    Each new iterate x_{n+1} is paired with x_{n+1-lag} for lag in
    CHECK_LAGS and the contraction bound is evaluated on every such pair.
    ``pair_hook(m, lag, (xa, fxa, gxa), (xb, fxb, gxb))`` is called for each
    checked pair. With ``strict=True`` a failure to converge raises
    NonConvergence (carrying the report); otherwise the report comes back
    with ``converged=False``.
    """
    d = p.metric
    x = p.x0
    fx, gx = p.f(x), p.g(x)
    d0 = float(d(fx, gx))
    phi_hat = majorant(p.gauges)
    r0 = compute_r0(phi_hat, d0)

    orbit = deque([fx], maxlen=TRAJECTORY_CAP)
    recent = deque([(x, fx, gx)], maxlen=max(CHECK_LAGS))
    dropped = 0
    gaps: list[float] = []
    violations: list[Violation] = []
    converged = False
    n = 0

    if d0 < p.tol_conv:
        # x0 is already a coincidence point
        converged = True
    else:
        while n < p.max_iter:
            x_next = _preimage(p, fx)
            fx_next, gx_next = p.f(x_next), p.g(x_next)
            gap = float(d(fx, fx_next))
            new = (x_next, fx_next, gx_next)
            for lag in CHECK_LAGS:
                if lag > len(recent):
                    break
                old = recent[-lag]
                lhs = float(d(old[1], fx_next))
                rhs = contraction_bound(p, old[0], x_next, old[1], fx_next, old[2], gx_next)
                if lhs > rhs * (1 + VIOLATION_RTOL) + VIOLATION_ATOL:
                    violations.append(Violation(n + 1 - lag, lhs, rhs, lag))
                if pair_hook is not None:
                    pair_hook(n + 1 - lag, lag, old, new)
            gaps.append(gap)
            if len(orbit) == orbit.maxlen:
                dropped += 1
            orbit.append(fx_next)
            recent.append(new)
            x, fx, gx = new
            n += 1
            if gap < p.tol_conv:
                converged = True
                break

    limit = fx
    z_arg = _preimage(p, limit)
    coin_res = float(d(p.f(z_arg), p.g(z_arg)))
    pts = list(orbit)
    report = SolveReport(
        converged=converged, iterations=n, trajectory_gaps=gaps, limit=limit,
        coincidence_argument=z_arg, coincidence_residual=coin_res, d0=d0, r0_bound=r0,
        observed_orbit_diameter=_diameter(d, pts), contraction_violations=violations,
        orbit=pts, orbit_offset=dropped, metric=d,
    )
    if p.weakly_compatible and p.self_map:
        report.fixed_point_residual = float(d(limit, p.f(limit)))
        report.commutation_residual = float(d(p.f(p.g(z_arg)), p.g(p.f(z_arg))))
    if dropped:
        report.notes.append(f"orbit truncated to the last {TRAJECTORY_CAP} points")
    if len({id(g) for g in p.gauges}) > 1:
        report.notes.append("r0 uses the pointwise-max majorant: diagnostic bound, "
                            "the proof-level monotone majorant is nonconstructive")
    if strict and not converged:
        raise NonConvergence(report)
    return report


def verify_point_of_coincidence(p: JungckProblem, z_arg, tol: float = 1e-9) -> bool:
    """True iff d(f z, g z) <= tol."""
    return float(p.metric(p.f(z_arg), p.g(z_arg))) <= tol


def orbit_diameter(report: SolveReport, window: int, start: int = 0) -> float:
    """Diameter of the retained orbit points start .. start+window-1."""
    if report.metric is None:
        raise DomainError("report carries no metric")
    if window < 1 or start < 0 or start + window > len(report.orbit):
        raise DomainError(f"window [{start}, {start + window}) exceeds the {len(report.orbit)} retained points")
    return _diameter(report.metric, report.orbit[start:start + window])


# ---------------------------------------------------------------------------
# cone-valued version
# ---------------------------------------------------------------------------

def tvs_jungck_solve(space: ConeMetricSpace, f, g, cone_gauges: Sequence[ConeGauge], e, x0,
                     g_preimage, tol_conv: float = 1e-10, max_iter: int = 10_000,
                     weakly_compatible: bool = False, self_map: bool = False,
                     strict: bool = False) -> SolveReport:
    """Solve with cone gauges by reduction to scalar gauges along e.

    phi_k(t) = ||psi_k(t e)||_e and d_e = xi_e o d; the scalar problem goes
    through :func:`jungck_solve`. Independently, the cone-side condition
    d(fx, fy) <=_P psi_k(...) for some k is checked on every orbit pair.
    """
    cone = space.cone
    if not cones.interior_contains(cone, e):
        raise NotInteriorError(f"e={list(e)} is not interior")
    if len(cone_gauges) != 5:
        raise DomainError(f"need exactly five cone gauges, got {len(cone_gauges)}")
    e = np.asarray(e, dtype=float)
    phis = [gauge_from_cone_map(cone, e, psi) for psi in cone_gauges]
    de = induced_metric(space, e)
    problem = JungckProblem(de, f, g, g_preimage, phis, x0, tol_conv, max_iter,
                            weakly_compatible, self_map)
    tvs_viol = []

    def cone_side(m, lag, a, b):
        (_, fx, gx), (_, fy, gy) = a, b
        lhs = space.distance(fx, fy)
        args = (space.distance(gx, gy), space.distance(gx, fx), space.distance(gy, fy),
                space.distance(gx, fy), space.distance(fx, gy))
        cands = [psi(v) for psi, v in zip(cone_gauges, args)]
        if not any(cones._contains(cone, u - lhs) for u in cands):
            tvs_viol.append((m, lag, lhs.tolist(), [u.tolist() for u in cands]))

    report = jungck_solve(problem, pair_hook=cone_side)
    scalar_flagged = {(v.n, v.lag) for v in report.contraction_violations}
    tvs_flagged = {(m, lag) for m, lag, _, _ in tvs_viol}
    report.tvs_violations = tvs_viol
    report.check_disagreements = sorted(scalar_flagged ^ tvs_flagged)
    if report.check_disagreements:
        report.notes.append("scalarized and cone-side contraction checks disagree on some pairs")
    if strict and not report.converged:
        raise NonConvergence(report)
    return report


# ---------------------------------------------------------------------------
# affine maps on R^n (CLI problems)
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class AffineMap:
    """x -> M x + b."""

    M: np.ndarray
    b: np.ndarray

    def __call__(self, x):
        return self.M @ np.asarray(x, dtype=float) + self.b

    def preimage(self, y):
        return np.linalg.solve(self.M, np.asarray(y, dtype=float) - self.b)


def affine(M, b=None) -> AffineMap:
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.shape[0] != M.shape[1]:
        raise DomainError("affine maps must be square")
    b = np.zeros(M.shape[0]) if b is None else np.asarray(b, dtype=float).reshape(-1)
    if b.shape[0] != M.shape[0]:
        raise DomainError("offset has the wrong dimension")
    return AffineMap(M, b)


class EuclideanMetric:
    """||x - y||_2 on R^n; diameters go through scipy's pdist."""

    pdist_name = "euclidean"

    def __call__(self, x, y) -> float:
        return float(np.linalg.norm(np.asarray(x, float) - np.asarray(y, float)))

    def diameter(self, pts) -> float:
        P = np.asarray(pts, dtype=float).reshape(len(pts), -1)
        return float(pdist(P, self.pdist_name).max()) if len(P) > 1 else 0.0


class ChebyshevMetric(EuclideanMetric):
    """max_i |x_i - y_i| on R^n."""

    pdist_name = "chebyshev"

    def __call__(self, x, y) -> float:
        return float(np.max(np.abs(np.asarray(x, float) - np.asarray(y, float))))
