"""Acceptance criteria 1-11, each at its stated tolerance.

Every criterion prints one ``criterion N PASS|FAIL`` line (also collected
into the pytest terminal summary). Run directly with
``python tests/test_acceptance.py`` for the lines alone.
"""

import os
import subprocess
import sys
import time

import numpy as np
import pytest

from conescale import cones, gauges
from conescale.cone_metric import (
    coordinatewise_space,
    induced_metric,
    lorentz_space,
    order_check,
    pushed_space,
)
from conescale.fixed_point import EuclideanMetric, JungckProblem, affine, jungck_solve, tvs_jungck_solve
from conescale.scalarization import equivalence_constants, norm_e, xi
from conescale.selftest import random_polyhedral

TOL = 1e-9
SUITE_BUDGET = 60.0
FAMILIES = ("orthant", "lorentz", "polyhedral")
RESULTS: dict[int, str] = {}


def rng_for(n: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([2024, n])))


def family_cases(rng, family, n, refresh=50):
    """n cones of one family, dimension cycling through 2..6."""
    cone = None
    for i in range(n):
        if i % refresh == 0:
            dim = 2 + (i // refresh) % 5
            cone = {"orthant": cones.orthant, "lorentz": cones.lorentz}.get(
                family, lambda m: random_polyhedral(m, rng))(dim)
        yield cone


def scaled(*vals) -> float:
    return TOL * max(1.0, *(abs(float(v)) for v in vals))


def record(n: int, title: str, failures: int, total: int, started: float, extra: str = "",
           timed: float | None = None) -> bool:
    elapsed = time.perf_counter() - started
    ok = failures == 0 and total > 0 and (elapsed if timed is None else timed) < SUITE_BUDGET
    line = f"criterion {n:>2} {'PASS' if ok else 'FAIL'}  {title}: {failures}/{total} failures, {elapsed:.1f}s"
    if extra:
        line += f" ({extra})"
    RESULTS[n] = line
    print(line)
    return ok


def criterion_1() -> bool:
    t0, rng = time.perf_counter(), rng_for(1)
    fails = total = 0
    for fam in FAMILIES:
        for cone in family_cases(rng, fam, 1000):
            e = cones.sample_interior(cone, rng)
            y, y2 = cones.sample_vector(cone, rng), cones.sample_vector(cone, rng)
            p = cones.sample_point(cone, rng)
            lam = float(np.exp(rng.normal(0, 1.5)))
            f = lambda v: xi(cone, e, v).value  # noqa: E731
            fy, fy2 = f(y), f(y2)
            checks = [
                f(np.zeros(cone.dim)) == 0.0,
                f(p) >= -scaled(*p),
                f(y - p) <= fy + scaled(fy),
                f(y + y2) <= fy + fy2 + scaled(fy, fy2),
                abs(f(lam * y) - lam * fy) <= scaled(lam * fy),
            ]
            total += len(checks)
            fails += checks.count(False)
    return record(1, "scalarization laws", fails, total, t0)


def criterion_2() -> bool:
    t0, rng = time.perf_counter(), rng_for(2)
    fails = total = 0
    worst = 0.0
    for fam in ("orthant", "lorentz"):
        for cone in family_cases(rng, fam, 1000):
            e = cones.sample_interior(cone, rng)
            if fam == "lorentz":
                e = np.append(np.zeros(cone.dim - 1), e[-1])
            y = cones.sample_vector(cone, rng)
            a = xi(cone, e, y, method="closed").value
            b = xi(cone, e, y, method="bisection").value
            err = abs(a - b) / max(1.0, abs(a))
            worst = max(worst, err)
            total += 1
            fails += err > 1e-8
    return record(2, "closed form vs bisection", fails, total, t0, f"worst rel {worst:.1e}")


def criterion_3() -> bool:
    t0, rng = time.perf_counter(), rng_for(3)
    fails = total = 0
    for fam in FAMILIES:
        for cone in family_cases(rng, fam, 1000):
            e = cones.sample_interior(cone, rng)
            x, x2 = cones.sample_vector(cone, rng), cones.sample_vector(cone, rng)
            p = cones.sample_point(cone, rng)
            lam = float(rng.normal(0, 3))
            n = lambda v: norm_e(cone, e, v)  # noqa: E731
            nx, nx2 = n(x), n(x2)
            checks = [
                n(np.zeros(cone.dim)) == 0.0,
                nx > 0 if np.any(x) else nx == 0,
                n(x + x2) <= nx + nx2 + scaled(nx, nx2),
                abs(n(lam * x) - abs(lam) * nx) <= scaled(lam * nx),
                abs(n(p) - xi(cone, e, p).value) <= scaled(n(p)),
            ]
            total += len(checks)
            fails += checks.count(False)
    return record(3, "norm axioms and identity on P", fails, total, t0)


def criterion_4() -> bool:
    t0, rng = time.perf_counter(), rng_for(4)
    fails = total = 0
    per_family = 334
    for fam in FAMILIES:
        for cone in family_cases(rng, fam, per_family):
            e, e2 = cones.sample_interior(cone, rng), cones.sample_interior(cone, rng)
            x = cones.sample_vector(cone, rng)
            lo, up = equivalence_constants(cone, e, e2)
            n1, n2 = norm_e(cone, e, x), norm_e(cone, e2, x)
            checks = [
                lo * n1 <= n2 + scaled(n1, n2),
                n2 <= up * n1 + scaled(n1, n2),
                abs(lo * norm_e(cone, e, e2) - norm_e(cone, e2, e2)) <= scaled(1.0),
                abs(norm_e(cone, e2, e) - up * norm_e(cone, e, e)) <= scaled(up),
            ]
            total += len(checks)
            fails += checks.count(False)
    return record(4, "equivalence sandwich and tightness", fails, total, t0)


def criterion_5() -> bool:
    t0, rng = time.perf_counter(), rng_for(5)
    poly = random_polyhedral(3, rng)
    gens = np.column_stack([cones.sample_interior(poly, rng) for _ in range(3)])
    fails = total = 0
    for space in (coordinatewise_space(3), lorentz_space(3), pushed_space(poly, gens)):
        e, e2 = cones.sample_interior(space.cone, rng), cones.sample_interior(space.cone, rng)
        de, de2 = induced_metric(space, e), induced_metric(space, e2)
        lo, up = equivalence_constants(space.cone, e, e2)
        for _ in range(200):
            x, y, z = space.draw(rng), space.draw(rng), space.draw(rng)
            dxy, dyz, dxz, dyx = de(x, y), de(y, z), de(x, z), de(y, x)
            tol = scaled(dxy + dyz)
            checks = [
                de(x, x) == 0.0,
                dxy > 0 or space.is_same(x, y),
                abs(dxy - dyx) <= tol,
                dxz <= dxy + dyz + tol,
                lo * dxy <= de2(x, y) + tol,
                de2(x, y) <= up * dxy + tol,
            ]
            total += len(checks)
            fails += checks.count(False)
    return record(5, "induced metric axioms and sandwich", fails, total, t0)


def criterion_6() -> bool:
    t0, rng = time.perf_counter(), rng_for(6)
    fails = total = 0
    counts = {"orthant": 334, "lorentz": 333, "polyhedral": 333}
    for fam in FAMILIES:
        for cone in family_cases(rng, fam, counts[fam]):
            x = cones.sample_point(cone, rng)
            y = x + cones.sample_point(cone, rng)
            es = [cones.sample_interior(cone, rng) for _ in range(16)]
            res = order_check(cone, x, y, e_samples=es)
            if not res["leq_membership"]:
                continue
            total += 1
            fails += not res["leq_scalarized"]
    return record(6, "order forward direction (16 e per pair)", fails, total, t0)


def criterion_7() -> bool:
    t0 = time.perf_counter()
    fails = total = 0
    worst = 0.0
    for k in np.round(np.arange(1, 10) / 10, 1):
        g = gauges.linear(k)
        for d0 in (0.5, 1.0, 10.0):
            r = gauges.compute_r0(g, d0)
            err = abs(r - d0 / (1 - k))
            worst = max(worst, err)
            h = 1e-8 * max(1.0, r)
            beyond = [r + h, r * (1 + 1e-6) + h, 2 * r + h, 1e3 * r]
            checks = [
                err <= TOL,
                (r - h) - g(r - h) <= d0,
                all(s - g(s) > d0 for s in beyond),
            ]
            total += len(checks)
            fails += checks.count(False)
    return record(7, "r0 for Linear(k)", fails, total, t0, f"worst abs {worst:.1e}")


def affine_problem(F, b, k, **kw) -> JungckProblem:
    g = affine([[1.0]])
    return JungckProblem(EuclideanMetric(), affine([[F]], [b]), g, g.preimage,
                         [gauges.linear(k)] * 5, np.array([0.0]), **kw)


def criterion_8() -> bool:
    t0 = time.perf_counter()
    r = jungck_solve(affine_problem(0.5, 1.0, 0.6))
    checks = [
        r.converged,
        abs(r.limit[0] - 2.0) <= 1e-8,
        r.coincidence_residual < 1e-8,
        r.iterations <= 60,
        r.observed_orbit_diameter <= r.r0_bound + 1e-6,
    ]
    extra = (f"{r.iterations} iterations, residual {r.coincidence_residual:.1e}, "
             f"diameter {r.observed_orbit_diameter:.6f} vs r0 {r.r0_bound:.6f}")
    return record(8, "affine solver convergence", checks.count(False), len(checks), t0, extra)


def criterion_9() -> bool:
    t0, rng = time.perf_counter(), rng_for(9)
    space = coordinatewise_space(2)
    o = space.cone
    ident = affine(np.eye(2))
    r = tvs_jungck_solve(space, affine(0.5 * np.eye(2)), ident, [gauges.scale(o, 0.6)] * 5,
                         [1.0, 1.0], np.array([8.0, 8.0]), ident.preimage)
    checks = [r.converged, float(np.abs(r.limit).max()) < 1e-8, not r.check_disagreements,
              not r.tvs_violations]
    reductions = [(o, np.ones(2))]
    for fam in FAMILIES:
        cone = cones.lorentz(3) if fam == "lorentz" else random_polyhedral(3, rng) if fam == "polyhedral" \
            else cones.orthant(4)
        reductions.append((cone, cones.sample_interior(cone, rng)))
    for cone, e in reductions:
        for k in np.round(np.arange(0, 10) / 10, 1):
            phi = gauges.gauge_from_cone_map(cone, e, gauges.scale(cone, k))
            checks.append(all(abs(phi(t) - k * t) <= scaled(k * t) for t in gauges.DEFAULT_GRID))
    return record(9, "cone-gauge solver reduction", checks.count(False), len(checks), t0,
                  f"{r.iterations} iterations, {len(r.check_disagreements)} check disagreements")


def criterion_10() -> bool:
    t0 = time.perf_counter()
    r = jungck_solve(affine_problem(1.0, 1.0, 0.5))
    checks = [not r.converged, len(r.contraction_violations) > 0]
    return record(10, "negative control", checks.count(False), len(checks), t0,
                  f"{len(r.contraction_violations)} contraction violations")


def criterion_11() -> bool:
    # the budget applies to each selftest run; the two runs are sequential
    t0 = time.perf_counter()
    env = {k: v for k, v in os.environ.items() if k != "CONESCALE_SEED"}
    argv = [sys.executable, "-m", "conescale", "selftest", "--seed", "42"]
    runs, times = [], []
    for _ in range(2):
        start = time.perf_counter()
        runs.append(subprocess.run(argv, capture_output=True, env=env))
        times.append(time.perf_counter() - start)
    codes = [r.returncode for r in runs]
    checks = [codes == [0, 0], runs[0].stdout == runs[1].stdout, len(runs[0].stdout) > 0]
    return record(11, "selftest reproducibility", checks.count(False), len(checks), t0,
                  f"exit codes {codes}, {len(runs[0].stdout)} bytes, runs {times[0]:.1f}s/{times[1]:.1f}s",
                  timed=max(times))


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 12)}


@pytest.mark.parametrize("n", list(CRITERIA))
def test_criterion(n):
    assert CRITERIA[n](), RESULTS.get(n)


if __name__ == "__main__":
    ok = [CRITERIA[n]() for n in CRITERIA]
    sys.exit(0 if all(ok) else 1)
