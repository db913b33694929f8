"""Seeded invariant suites, one per module, behind the ``selftest`` command.

Every check draws its samples from a Philox generator keyed by
(seed, suite index), so a suite's output depends only on the seed.
Results are plain dicts: name -> {passed, samples, failures, worst}.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import cones, gauges
from .cone_metric import (
    check_condition_translation,
    coordinatewise_space,
    default_e_samples,
    induced_metric,
    lorentz_space,
    order_check,
    pushed_space,
    sequence_analysis,
    validate_cone_metric,
)
from .cones import SolidCone
from .fixed_point import (
    EuclideanMetric,
    JungckProblem,
    affine,
    jungck_solve,
    orbit_diameter,
    tvs_jungck_solve,
)
from .scalarization import _norm, _xi, equivalence_constants

SUITES = ("cones", "scalarization", "cone_metric", "gauges", "fixed_point")
LAW_TOL = 1e-9
FAMILIES = ("orthant", "lorentz", "polyhedral")


@dataclass
class Check:
    name: str
    samples: int = 0
    failures: int = 0
    worst: float = 0.0
    examples: list = field(default_factory=list)

    def record(self, ok: bool, excess: float = 0.0, example=None):
        self.samples += 1
        if not ok:
            self.failures += 1
            if example is not None and len(self.examples) < 3:
                self.examples.append(example)
        self.worst = max(self.worst, float(excess))

    @property
    def passed(self) -> bool:
        return self.failures == 0 and self.samples > 0

    def to_dict(self) -> dict:
        out = {"passed": self.passed, "samples": self.samples, "failures": self.failures,
               "worst_excess": self.worst}
        if self.examples:
            out["examples"] = self.examples
        return out


def suite_rng(seed: int, suite: str) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), SUITES.index(suite)])))


def random_polyhedral(dim: int, rng: np.random.Generator, extra: int = 2) -> SolidCone:
    """A well-conditioned pointed polyhedral cone with dim + extra facets."""
    w = 0.5 + rng.random(dim)
    rows = np.eye(dim) + 0.3 * rng.normal(size=(dim, dim))
    more = rng.normal(size=(extra, dim))
    A = np.vstack([rows, more])
    for i, a in enumerate(A):
        # keep every facet at least ~25 degrees away from the witness ray
        cos = a @ w / (np.linalg.norm(a) * np.linalg.norm(w))
        if cos < 0.4:
            A[i] = a + (0.4 - cos) * 2.0 * np.linalg.norm(a) * w / np.linalg.norm(w)
    return cones.polyhedral(A, w)


def random_cone(family: str, dim: int, rng: np.random.Generator) -> SolidCone:
    if family == "orthant":
        return cones.orthant(dim)
    if family == "lorentz":
        return cones.lorentz(dim)
    return random_polyhedral(dim, rng)


def _cases(rng, n_per_family: int, refresh: int = 50):
    """Yield (family, cone) n_per_family times per family, dims cycling 2..6."""
    for fam in FAMILIES:
        cone = None
        for i in range(n_per_family):
            if i % refresh == 0:
                cone = random_cone(fam, 2 + (i // refresh) % 5, rng)
            yield fam, cone


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(1.0, abs(a), abs(b))


# ---------------------------------------------------------------------------

def suite_cones(rng, n: int = 1000) -> list[Check]:
    basic = Check("interior_absorbs_P")
    refl = Check("leq_reflexive")
    trans = Check("leq_transitive")
    anti = Check("leq_antisymmetric")
    strict = Check("strict_implies_leq")
    scale = Check("find_scale_output")
    valid = Check("validate_random_cones")
    for fam, cone in _cases(rng, n):
        x = cones.sample_point(cone, rng)
        y = cones.sample_interior(cone, rng)
        basic.record(cones.contains(cone, x + y) and cones.interior_contains(cone, x + y), example=fam)

        a = cones.sample_vector(cone, rng)
        refl.record(cones.leq(cone, a, a))
        b = a + cones.sample_point(cone, rng)
        c = b + cones.sample_point(cone, rng)
        if cones.leq(cone, a, b) and cones.leq(cone, b, c):
            trans.record(cones.leq(cone, a, c), example=fam)
        # near-equal pairs probe antisymmetry at the tolerance scale
        tiny = a + 1e-13 * rng.normal(size=cone.dim)
        for u, v in ((a, tiny), (a, b)):
            if cones.leq(cone, u, v) and cones.leq(cone, v, u):
                gap = float(np.abs(u - v).max())
                anti.record(gap <= 10 * cone.tol_membership * max(1.0, np.abs(v - u).max()), gap)
        z = a + cones.sample_interior(cone, rng) * (1 if rng.random() < 0.5 else -1)
        if cones.strictly_less(cone, a, z):
            strict.record(cones.leq(cone, a, z))
        c_int, e_int = cones.sample_interior(cone, rng), cones.sample_interior(cone, rng)
        d = cones.find_scale(cone, c_int, e_int)
        scale.record(cones.strictly_less(cone, np.zeros(cone.dim), e_int - d * c_int), example=fam)
    for fam in FAMILIES:
        for dim in range(2, 7):
            rep = cones.validate(random_cone(fam, dim, rng), n_pairs=200, rng=rng)
            valid.record(rep.passed, example=f"{fam}/{dim}")
    return [basic, refl, trans, anti, strict, scale, valid]


def suite_scalarization(rng, n: int = 1000) -> list[Check]:
    names = ["xi_zero_at_zero", "xi_nonneg_on_cone", "xi_monotone", "xi_subadditive", "xi_homogeneous",
             "closed_ray", "interior_point_bounds", "norm_axioms", "norm_equals_xi_on_cone", "sandwich",
             "tightness", "lipschitz", "closed_form_vs_bisection"]
    ck = {k: Check(k) for k in names}
    for fam, cone in _cases(rng, n):
        m = cone.dim
        e = cones.sample_interior(cone, rng)
        e2 = cones.sample_interior(cone, rng)
        y = cones.sample_vector(cone, rng)
        y2 = cones.sample_vector(cone, rng)
        p = cones.sample_point(cone, rng)
        xi = lambda v, ee=e: _xi(cone, ee, v).value  # noqa: E731

        ck["xi_zero_at_zero"].record(xi(np.zeros(m)) == 0.0)
        ck["xi_nonneg_on_cone"].record(xi(p) >= -LAW_TOL * max(1.0, np.abs(p).max()), example=fam)
        lower = y - cones.sample_point(cone, rng)
        ck["xi_monotone"].record(xi(lower) <= xi(y) + LAW_TOL * max(1.0, abs(xi(y))), example=fam)
        s = xi(y + y2) - xi(y) - xi(y2)
        ck["xi_subadditive"].record(s <= LAW_TOL * max(1.0, abs(xi(y)) + abs(xi(y2))), s, fam)
        lam = float(np.exp(rng.normal(0, 1.5)))
        r = _rel(xi(lam * y), lam * xi(y))
        ck["xi_homogeneous"].record(r <= LAW_TOL, r, fam)

        v = xi(y)
        sc = max(1.0, abs(v))
        inside = cones._contains(cone, v * e - y + 1e-8 * sc * e)
        outside = not cones._contains(cone, (v - 1e-6 * sc) * e - y)
        ck["closed_ray"].record(inside and outside, example=fam)

        xint = cones.sample_interior(cone, rng)
        lam = xi(xint) + float(rng.exponential()) + 1e-6
        if cones.strictly_less(cone, np.zeros(m), xint) and cones.strictly_less(cone, xint, lam * e):
            ok = xi(xint) >= -LAW_TOL and -xi(-xint) < lam and xi(xint) < lam
            ck["interior_point_bounds"].record(ok, example=fam)

        ny, ny2, nsum = _norm(cone, e, y), _norm(cone, e, y2), _norm(cone, e, y + y2)
        t = float(rng.normal(0, 3))
        nt = _norm(cone, e, t * y)
        ok = (ny >= 0 and nsum <= ny + ny2 + LAW_TOL * max(1.0, ny + ny2)
              and _rel(nt, abs(t) * ny) <= LAW_TOL)
        if ny == 0:
            ok = ok and np.abs(y).max() <= 1e-8
        ck["norm_axioms"].record(ok, example=fam)

        r = _rel(_norm(cone, e, p), xi(p))
        ck["norm_equals_xi_on_cone"].record(r <= LAW_TOL, r, fam)

        lo, up = equivalence_constants(cone, e, e2)
        n1, n2 = ny, _norm(cone, e2, y)
        tol = LAW_TOL * max(1.0, n1, n2)
        ck["sandwich"].record(lo * n1 <= n2 + tol and n2 <= up * n1 + tol, example=fam)
        t1 = _rel(lo * _norm(cone, e, e2), _norm(cone, e2, e2))
        t2 = _rel(_norm(cone, e2, e), up * _norm(cone, e, e))
        ck["tightness"].record(max(t1, t2) <= LAW_TOL, max(t1, t2), fam)

        lip = abs(xi(y) - xi(y2)) - _norm(cone, e, y - y2)
        ck["lipschitz"].record(lip <= LAW_TOL * max(1.0, abs(xi(y)), abs(xi(y2))), lip, fam)

        if fam == "orthant" or fam == "lorentz":
            ee = e if fam == "orthant" else np.append(np.zeros(m - 1), e[-1])
            a = _xi(cone, ee, y, "closed").value
            b = _xi(cone, ee, y, "bisection").value
            ck["closed_form_vs_bisection"].record(_rel(a, b) <= 1e-8, _rel(a, b), fam)
    return list(ck.values())


def metric_spaces(rng) -> list:
    poly = random_polyhedral(3, rng)
    gens = np.column_stack([cones.sample_interior(poly, rng) for _ in range(3)])
    return [coordinatewise_space(3), lorentz_space(3), pushed_space(poly, gens)]


def suite_cone_metric(rng, n_triples: int = 200, n_pairs: int = 1000) -> list[Check]:
    axioms = Check("cone_metric_axioms")
    dem = Check("induced_metric_axioms")
    sand = Check("induced_sandwich")
    order = Check("order_forward_direction")
    seq = Check("sequence_tail_consistency")
    trans = Check("condition_translation_forward")
    for space in metric_spaces(rng):
        cone = space.cone
        axioms.record(validate_cone_metric(space, n_triples, rng).passed, example=space.name)
        e, e2 = cones.sample_interior(cone, rng), cones.sample_interior(cone, rng)
        de, de2 = induced_metric(space, e), induced_metric(space, e2)
        lo, up = equivalence_constants(cone, e, e2)
        for _ in range(n_triples):
            x, y, z = space.draw(rng), space.draw(rng), space.draw(rng)
            dxy, dyz, dxz = de(x, y), de(y, z), de(x, z)
            tol = LAW_TOL * max(1.0, dxy + dyz)
            ok = (de(x, x) == 0.0 and abs(dxy - de(y, x)) <= tol and dxz <= dxy + dyz + tol
                  and (dxy > 0 or space.is_same(x, y)))
            dem.record(ok, example=space.name)
            d2 = de2(x, y)
            sand.record(lo * dxy <= d2 + tol and d2 <= up * dxy + tol, example=space.name)

        es = default_e_samples(cone, 4, rng)
        base = space.draw(rng)
        step = space.draw(rng)
        pts = [base + 2.0 ** -k * step for k in range(24)]
        rep = sequence_analysis(space, pts, es, 1e-3, limit=base)
        seq.record(rep["consistent"], example=space.name)

        res = check_condition_translation(space, "d(fx,fy)", "0.5*d(x,y)", {"f": lambda v: 0.5 * v},
                                          sample_pairs=50, e_samples=es, rng=rng)
        trans.record(res["forward_violations"] == 0 and res["membership_violations"] == 0, example=space.name)

    # forward direction of the order characterisation, spread over the families
    for fam, cone in _cases(rng, n_pairs // len(FAMILIES) + 1):
        x = cones.sample_point(cone, rng)
        y = x + cones.sample_point(cone, rng)
        res = order_check(cone, x, y, samples=16, rng=rng)
        if res["leq_membership"]:
            order.record(res["leq_scalarized"], example=fam)
    return [axioms, dem, sand, order, seq, trans]


def suite_gauges(rng) -> list[Check]:
    builtin = Check("builtin_gauges_valid")
    r0 = Check("r0_linear_closed_form")
    r0_def = Check("r0_defining_inequalities")
    reduce_ = Check("cone_map_reduces_to_linear")
    maj = Check("majorant_phi2_surrogate")
    psi2 = Check("psi2_eventual_bound")
    for g in [gauges.linear(k) for k in np.arange(1, 10) / 10] + [gauges.saturating()]:
        builtin.record(gauges.validate_gauge(g).passed, example=g.name)
    for k in np.arange(1, 10) / 10:
        g = gauges.linear(k)
        for d0 in (0.5, 1.0, 10.0):
            r = gauges.compute_r0(g, d0)
            err = abs(r - d0 / (1 - k))
            r0.record(err <= 1e-9, err, [float(k), d0])
    for g in (gauges.linear(0.3), gauges.saturating(), gauges.majorant([gauges.linear(0.2), gauges.saturating()])):
        for d0 in (0.0, 0.5, 3.0, 40.0):
            r = gauges.compute_r0(g, d0)
            ok = r - g(r) <= d0 + 1e-6 and (r + 1e-6) - g(r + 1e-6) > d0
            r0_def.record(ok, example=[g.name, d0])
    grid = gauges.DEFAULT_GRID
    for fam in FAMILIES:
        for dim in (2, 4):
            cone = random_cone(fam, dim, rng)
            e = cones.sample_interior(cone, rng)
            for k in (0.0, 0.3, 0.9):
                phi = gauges.gauge_from_cone_map(cone, e, gauges.scale(cone, k))
                err = max(abs(phi(t) - k * t) / max(1.0, t) for t in grid)
                reduce_.record(err <= 1e-9, err, [fam, dim, k])
    for combo in ([gauges.linear(0.3), gauges.linear(0.7)], [gauges.linear(0.5), gauges.saturating()]):
        rep = gauges.validate_gauge(gauges.majorant(combo))
        maj.record(rep.checks.get("limsup", False) and "Phi2" in rep.details["consistent_with"])
    for fam in ("orthant", "lorentz"):
        cone = random_cone(fam, 3, rng)
        for psi in (gauges.scale(cone, 0.6, 0.2), gauges.operator(cone, 0.5 * np.eye(3), 0.25)):
            res = gauges.psi2_check(psi, samples=200, rng=rng)
            psi2.record(res["passed"], example=[fam, psi.form])
    return [builtin, r0, r0_def, reduce_, maj, psi2]


def _affine_problem(F, b, G=1.0, k=0.6, x0=0.0, **kw) -> JungckProblem:
    f = affine([[F]], [b])
    g = affine([[G]])
    return JungckProblem(EuclideanMetric(), f, g, g.preimage, [gauges.linear(k)] * 5,
                         np.array([x0]), **kw)


def odiam_excess(report, phi) -> float:
    """Largest excess of delta(O_n(x_k)) over phi(delta(O_{n+1}(x_{k-1})))."""
    pts = report.orbit
    N = len(pts)
    if N < 3:
        return 0.0
    D = report.metric.pairwise(pts) if hasattr(report.metric, "pairwise") else \
        np.array([[report.metric(a, b) for b in pts] for a in pts])
    worst = -np.inf
    for k in range(1, N):
        for n in range(1, N - k):
            inner = D[k:k + n + 1, k:k + n + 1].max()
            outer = D[k - 1:k + n + 1, k - 1:k + n + 1].max()
            worst = max(worst, inner - phi(outer))
    return float(worst)


def suite_fixed_point(rng) -> list[Check]:
    conv = Check("affine_convergence")
    bounded = Check("orbit_within_r0")
    odiam = Check("orbit_diameter_contraction")
    uniq = Check("uniqueness_probe")
    common = Check("weakly_compatible_fixed_point")
    tvs = Check("tvs_checks_agree")
    neg = Check("negative_control")

    rep = jungck_solve(_affine_problem(0.5, 1.0, weakly_compatible=True, self_map=True))
    conv.record(rep.converged and abs(rep.limit[0] - 2) < 1e-8 and rep.coincidence_residual < 1e-8
                and rep.iterations <= 60)
    bounded.record(not rep.contraction_violations and rep.observed_orbit_diameter <= rep.r0_bound + 1e-6,
                   rep.observed_orbit_diameter - rep.r0_bound)
    common.record(rep.fixed_point_residual <= 10 * 1e-10, rep.fixed_point_residual)

    phi_hat = gauges.majorant([gauges.linear(0.6)] * 5)
    for F, b, G in ((0.5, 1.0, 1.0), (0.3, -2.0, 2.0), (-0.4, 0.5, 1.0)):
        for x0 in rng.normal(0, 5, size=3):
            r = jungck_solve(_affine_problem(F, b, G, x0=float(x0)))
            exc = odiam_excess(r, phi_hat)
            odiam.record(exc <= 1e-9, exc)
            bounded.record(not r.contraction_violations and r.observed_orbit_diameter <= r.r0_bound + 1e-6)
        limits = [jungck_solve(_affine_problem(F, b, G, x0=float(x0))).limit[0] for x0 in rng.normal(0, 20, size=3)]
        spread = max(limits) - min(limits)
        uniq.record(spread <= 10 * 1e-10, spread)

    space = coordinatewise_space(2)
    o = space.cone
    ident = affine(np.eye(2))
    for M, psi in ((0.5 * np.eye(2), gauges.scale(o, 0.6)),
                   (np.diag([0.5, 0.25]), gauges.operator(o, np.diag([0.5, 0.25])))):
        r = tvs_jungck_solve(space, affine(M), ident, [psi] * 5, [1.0, 1.0], np.array([8.0, 8.0]),
                             ident.preimage)
        ok = r.converged and np.abs(r.limit).max() < 1e-8 and not r.check_disagreements and not r.tvs_violations
        tvs.record(ok, len(r.check_disagreements))

    r = jungck_solve(_affine_problem(1.0, 1.0, k=0.5, max_iter=500))
    neg.record(not r.converged and len(r.contraction_violations) > 0)
    return [conv, bounded, odiam, uniq, common, tvs, neg]


RUNNERS = {
    "cones": suite_cones,
    "scalarization": suite_scalarization,
    "cone_metric": suite_cone_metric,
    "gauges": suite_gauges,
    "fixed_point": suite_fixed_point,
}


def run_suite(name: str, seed: int) -> dict:
    checks = RUNNERS[name](suite_rng(seed, name))
    return {c.name: c.to_dict() for c in checks}


def run_selftest(suites=None, seed: int = 42) -> dict:
    suites = list(SUITES) if not suites else list(suites)
    unknown = [s for s in suites if s not in RUNNERS]
    if unknown:
        raise ValueError(f"unknown suites {unknown}; choose from {list(SUITES)}")
    results = {s: run_suite(s, seed) for s in suites}
    failures = sum(c["failures"] + (0 if c["samples"] else 1) for r in results.values() for c in r.values())
    return {"seed": seed, "suites": results, "failures": failures, "passed": failures == 0}
