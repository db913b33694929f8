import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conescale import gauges
from conescale.cone_metric import coordinatewise_space
from conescale.errors import DomainError, NonConvergence, RangeInclusionError
from conescale.fixed_point import (
    ChebyshevMetric,
    EuclideanMetric,
    JungckProblem,
    affine,
    jungck_solve,
    orbit_diameter,
    tvs_jungck_solve,
    verify_point_of_coincidence,
)

ident1 = affine([[1.0]])


def problem(F, b, k=0.6, G=1.0, x0=0.0, **kw):
    g = affine([[G]])
    return JungckProblem(EuclideanMetric(), affine([[F]], [b]), g, g.preimage,
                         [gauges.linear(k)] * 5, np.array([x0]), **kw)


def test_affine_converges_to_two():
    r = jungck_solve(problem(0.5, 1.0))
    assert r.converged and r.status == "converged"
    assert r.limit[0] == pytest.approx(2.0, abs=1e-8)
    assert r.coincidence_residual < 1e-8
    assert r.iterations <= 60
    assert r.d0 == 1.0
    assert r.r0_bound == pytest.approx(2.5, rel=1e-9)
    assert r.observed_orbit_diameter <= r.r0_bound + 1e-6
    assert not r.contraction_violations
    # gaps halve each step
    gaps = np.array(r.trajectory_gaps)
    assert np.allclose(gaps[1:] / gaps[:-1], 0.5)


def test_constant_map_converges_fast():
    r = jungck_solve(problem(0.0, 3.0))
    assert r.converged and r.iterations <= 2 and r.limit[0] == 3.0


def test_negative_control():
    r = jungck_solve(problem(1.0, 1.0, k=0.5, max_iter=300))
    assert not r.converged and r.status == "non_convergence"
    assert r.contraction_violations
    v = r.contraction_violations[0]
    assert v.lhs > v.rhs


def test_strict_raises_with_report():
    with pytest.raises(NonConvergence) as info:
        jungck_solve(problem(1.0, 1.0, k=0.5, max_iter=50), strict=True)
    assert info.value.report.iterations == 50


def test_range_inclusion_error():
    g = affine([[0.0]])
    p = JungckProblem(EuclideanMetric(), affine([[0.5]], [1.0]), g, g.preimage,
                      [gauges.linear(0.6)] * 5, np.array([1.0]))
    with pytest.raises(RangeInclusionError):
        jungck_solve(p)


def test_needs_five_gauges():
    with pytest.raises(DomainError):
        JungckProblem(EuclideanMetric(), ident1, ident1, ident1.preimage, [gauges.linear(0.5)] * 4,
                      np.zeros(1))


def test_weakly_compatible_reports_fixed_point():
    r = jungck_solve(problem(0.5, 1.0, weakly_compatible=True, self_map=True))
    assert r.fixed_point_residual < 1e-9
    assert r.commutation_residual < 1e-9


def test_verify_point_of_coincidence():
    p = problem(0.5, 1.0)
    assert verify_point_of_coincidence(p, np.array([2.0]))
    assert not verify_point_of_coincidence(p, np.array([0.0]))


def test_orbit_diameter_brute_force():
    r = jungck_solve(problem(-0.5, 1.0, x0=5.0))
    pts = [np.asarray(p) for p in r.orbit]
    brute = max(float(np.linalg.norm(a - b)) for a, b in itertools.combinations(pts[:20], 2))
    assert orbit_diameter(r, 20) == pytest.approx(brute, rel=1e-12)
    with pytest.raises(DomainError):
        orbit_diameter(r, len(pts) + 1)


def test_chebyshev_metric():
    d = ChebyshevMetric()
    assert d(np.array([0.0, 0.0]), np.array([1.0, -3.0])) == 3.0


@given(st.floats(-0.95, 0.95), st.floats(-10, 10), st.floats(0.5, 3.0), st.floats(-50, 50))
def test_affine_limit_matches_solve(F, b, G, x0):
    # x_{n+1} = (F x_n + b) / G; the coincidence point solves (G - F) z = b
    k = min(0.99, abs(F) / G + 0.01) if abs(F) / G < 0.98 else None
    if k is None:
        return
    r = jungck_solve(problem(F, b, k=k, G=G, x0=x0))
    assert r.converged
    z = b / (G - F)
    assert r.coincidence_argument[0] == pytest.approx(z, abs=1e-7 * max(1, abs(z)))
    assert r.limit[0] == pytest.approx(G * z, abs=1e-7 * max(1, abs(G * z)))
    assert not r.contraction_violations


def _tvs(M, psi, x0=(8.0, 8.0), g=None):
    space = coordinatewise_space(2)
    g = affine(np.eye(2)) if g is None else g
    return tvs_jungck_solve(space, affine(M), g, [psi] * 5, [1.0, 1.0], np.array(x0), g.preimage)


def test_tvs_scale():
    o = coordinatewise_space(2).cone
    r = _tvs(0.5 * np.eye(2), gauges.scale(o, 0.6))
    assert r.converged and np.abs(r.limit).max() < 1e-8
    assert r.coincidence_residual < 1e-8
    assert not r.check_disagreements and not r.tvs_violations


def test_tvs_operator():
    o = coordinatewise_space(2).cone
    A = np.diag([0.5, 0.25])
    r = _tvs(A, gauges.operator(o, A))
    assert r.converged and np.abs(r.limit).max() < 1e-8
    assert not r.check_disagreements and not r.tvs_violations


def test_tvs_identity_pair_stops_at_start():
    o = coordinatewise_space(2).cone
    r = _tvs(np.eye(2), gauges.scale(o, 0.6), x0=(3.0, -1.0))
    assert r.converged and r.iterations == 0
    assert list(r.limit) == [3.0, -1.0]


def test_tvs_expanding_map_flags_both_sides():
    o = coordinatewise_space(2).cone
    r = tvs_jungck_solve(coordinatewise_space(2), affine(np.eye(2), [1.0, 1.0]), affine(np.eye(2)),
                         [gauges.scale(o, 0.5)] * 5, [1.0, 1.0], np.zeros(2),
                         affine(np.eye(2)).preimage, max_iter=100)
    assert not r.converged
    assert r.contraction_violations and r.tvs_violations
    assert not r.check_disagreements


def test_report_json():
    out = jungck_solve(problem(0.5, 1.0)).to_json()
    assert out["status"] == "converged"
    assert out["limit"] == pytest.approx([2.0], abs=1e-8)
    assert isinstance(out["contraction_violations"], list)
