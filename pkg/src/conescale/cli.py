"""Command-line entry point: ``conescale <command> [flags]``.

All results go to stdout as JSON; ``--verbose`` adds a short human summary
on stderr. Exit codes: 0 success, 1 validation/parse failure, 2 solver
non-convergence (or failing selftest checks, which exit 1).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import cones, gauges
from .common import jsonable, make_rng, resolve_seed
from .cone_metric import (
    ConeMetricSpace,
    coordinatewise_space,
    induced_metric,
    lorentz_space,
    order_check,
    pushed_space,
    space_from_json,
    validate_cone_metric,
)
from .errors import ConescaleError, DomainError
from .fixed_point import (
    ChebyshevMetric,
    EuclideanMetric,
    JungckProblem,
    affine,
    jungck_solve,
    tvs_jungck_solve,
)
from .scalarization import equivalence_constants, norm_e, xi
from .selftest import SUITES, run_selftest


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _load_json(text: str, what: str):
    """Inline JSON, or a path to a JSON file."""
    src = text
    if not text.lstrip().startswith(("{", "[")) and os.path.exists(text):
        with open(text) as fh:
            src = fh.read()
    try:
        return json.loads(src)
    except json.JSONDecodeError as exc:
        raise DomainError(f"{what}: not valid JSON ({exc.msg})") from None


def _vector(text: str, what: str) -> np.ndarray:
    v = _load_json(text, what)
    if not isinstance(v, list) or not all(isinstance(a, (int, float)) and not isinstance(a, bool) for a in v):
        raise DomainError(f"{what} must be a JSON array of numbers")
    return np.asarray(v, dtype=float)


def _cone(args) -> cones.SolidCone:
    return cones.cone_from_json(_load_json(args.cone, "--cone"))


# -- problem files ----------------------------------------------------------------

_PROBLEM_KEYS = {"metric", "f", "g", "gauges", "x0", "tol_conv", "max_iter", "weakly_compatible",
                 "space", "e", "cone_gauges", "cone"}


def _affine_map(spec, mat_key, off_key, n=None, what="map"):
    if spec is None:
        if n is None:
            raise DomainError(f"{what} is required")
        return affine(np.eye(n))
    if not isinstance(spec, dict) or mat_key not in spec or set(spec) - {mat_key, off_key}:
        raise DomainError(f"{what} must be {{'{mat_key}': matrix, '{off_key}': vector}}")
    return affine(spec[mat_key], spec.get(off_key))


def _space(spec, default_cone=None) -> ConeMetricSpace:
    if not isinstance(spec, dict) or "kind" not in spec:
        raise DomainError("space must be an object with a 'kind'")
    kind = spec["kind"]
    if kind == "pushed" and "cone" not in spec and default_cone is not None:
        return pushed_space(default_cone, spec["generators"])
    if kind == "coordinatewise":
        return coordinatewise_space(int(spec["dim"]))
    if kind == "lorentz":
        return lorentz_space(int(spec["dim"]))
    if kind == "pushed":
        return pushed_space(cones.cone_from_json(spec["cone"]), spec["generators"])
    raise DomainError(f"unknown space kind {kind!r}")


def _scalar_metric(spec, default_cone=None):
    if spec is None or spec == "euclidean":
        return EuclideanMetric()
    if spec == "chebyshev":
        return ChebyshevMetric()
    if isinstance(spec, dict) and spec.get("kind") == "induced":
        space = _space(spec["space"], default_cone)
        return induced_metric(space, spec["e"])
    raise DomainError(f"unknown metric spec {spec!r}")


def _check_keys(cfg):
    """Reject unknown fields; returns the optional top-level cone."""
    if not isinstance(cfg, dict):
        raise DomainError("problem file must hold a JSON object")
    extra = set(cfg) - _PROBLEM_KEYS
    if extra:
        raise DomainError(f"unknown problem fields: {sorted(extra)}")
    return cones.cone_from_json(cfg["cone"]) if "cone" in cfg else None


def _five(items, build, what):
    if not isinstance(items, list) or len(items) not in (1, 5):
        raise DomainError(f"{what} must be a list of 1 or 5 entries")
    built = [build(it) for it in items]
    return built * 5 if len(built) == 1 else built


def problem_from_json(cfg: dict) -> JungckProblem:
    cone = _check_keys(cfg)
    for key in ("f", "gauges", "x0"):
        if key not in cfg:
            raise DomainError(f"problem file is missing {key!r}")
    x0 = np.asarray(cfg["x0"], dtype=float).reshape(-1)
    f = _affine_map(cfg["f"], "F", "b", what="f")
    g = _affine_map(cfg.get("g"), "G", "c", n=x0.size, what="g")
    if f.M.shape[0] != x0.size or g.M.shape[0] != x0.size:
        raise DomainError("f, g and x0 disagree on dimension")
    gs = _five(cfg["gauges"], gauges.gauge_from_json, "gauges")
    return JungckProblem(
        _scalar_metric(cfg.get("metric"), cone), f, g, g.preimage, gs, x0,
        tol_conv=float(cfg.get("tol_conv", 1e-10)), max_iter=int(cfg.get("max_iter", 10_000)),
        weakly_compatible=bool(cfg.get("weakly_compatible", False)), self_map=True,
    )


def _solve_tvs(cfg: dict):
    cone = _check_keys(cfg)
    for key in ("space", "e", "f", "cone_gauges", "x0"):
        if key not in cfg:
            raise DomainError(f"problem file is missing {key!r}")
    space = _space(cfg["space"], cone)
    x0 = np.asarray(cfg["x0"], dtype=float).reshape(-1)
    f = _affine_map(cfg["f"], "F", "b", what="f")
    g = _affine_map(cfg.get("g"), "G", "c", n=x0.size, what="g")
    psis = _five(cfg["cone_gauges"], lambda s: gauges.cone_gauge_from_json(space.cone, s), "cone_gauges")
    return tvs_jungck_solve(
        space, f, g, psis, cfg["e"], x0, g.preimage,
        tol_conv=float(cfg.get("tol_conv", 1e-10)), max_iter=int(cfg.get("max_iter", 10_000)),
        weakly_compatible=bool(cfg.get("weakly_compatible", False)), self_map=True,
    )


# -- commands -----------------------------------------------------------------------

def cmd_validate_cone(args):
    rep = cones.validate(_cone(args), n_pairs=args.samples, rng=make_rng(args.seed))
    return rep.to_dict(), 0


def cmd_scalarize(args):
    cone = _cone(args)
    res = xi(cone, _vector(args.e, "--e"), _vector(args.y, "--y"), method=args.method)
    return res.to_json(), 0


def cmd_norm(args):
    cone = _cone(args)
    return {"norm": norm_e(cone, _vector(args.e, "--e"), _vector(args.x, "--x"))}, 0


def cmd_equiv(args):
    cone = _cone(args)
    lower, upper = equivalence_constants(cone, _vector(args.e, "--e"), _vector(args.e2, "--e2"))
    return {"lower": lower, "upper": upper}, 0


def cmd_order(args):
    cone = _cone(args)
    res = order_check(cone, _vector(args.x, "--x"), _vector(args.y, "--y"), samples=args.samples,
                      rng=make_rng(args.seed))
    return res, 0


def cmd_metric_validate(args):
    space = space_from_json(_load_json(args.metric, "--metric"))
    rep = validate_cone_metric(space, args.samples, rng=make_rng(args.seed))
    return rep.to_dict(), 0 if rep.passed else 1


def cmd_solve(args):
    report = jungck_solve(problem_from_json(_load_json(args.config, "--config")))
    return report.to_json(), 0 if report.converged else 2


def cmd_solve_tvs(args):
    report = _solve_tvs(_load_json(args.config, "--config"))
    return report.to_json(), 0 if report.converged else 2


def cmd_selftest(args):
    res = run_selftest(args.suite, seed=args.seed)
    return res, 0 if res["passed"] else 1


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="PRNG seed for sampled checks (default 42; $CONESCALE_SEED overrides)")
    common.add_argument("--verbose", action="store_true", help="human-readable summary on stderr")

    p = _Parser(prog="conescale", description="Cone scalarization, induced metrics and Jungck solves.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("validate-cone", parents=[common], help="check the cone axioms")
    s.add_argument("--cone", required=True)
    s.add_argument("--samples", type=int, default=1000)
    s.set_defaults(func=cmd_validate_cone)

    s = sub.add_parser("scalarize", parents=[common], help="xi_e(y)")
    s.add_argument("--cone", required=True)
    s.add_argument("--e", required=True)
    s.add_argument("--y", required=True)
    s.add_argument("--method", choices=["auto", "closed", "bisection"], default="auto")
    s.set_defaults(func=cmd_scalarize)

    s = sub.add_parser("norm", parents=[common], help="||x||_e")
    s.add_argument("--cone", required=True)
    s.add_argument("--e", required=True)
    s.add_argument("--x", required=True)
    s.set_defaults(func=cmd_norm)

    s = sub.add_parser("equiv", parents=[common], help="equivalence constants between ||.||_e and ||.||_e2")
    s.add_argument("--cone", required=True)
    s.add_argument("--e", required=True)
    s.add_argument("--e2", required=True)
    s.set_defaults(func=cmd_equiv)

    s = sub.add_parser("order", parents=[common], help="x <=_P y by membership and by scalarization")
    s.add_argument("--cone", required=True)
    s.add_argument("--x", required=True)
    s.add_argument("--y", required=True)
    s.add_argument("--samples", type=int, default=16)
    s.set_defaults(func=cmd_order)

    s = sub.add_parser("metric-validate", parents=[common], help="check a finite cone metric")
    s.add_argument("--metric", required=True, help="finite cone-metric JSON (inline or file)")
    s.add_argument("--samples", type=int, default=200)
    s.set_defaults(func=cmd_metric_validate)

    s = sub.add_parser("solve", parents=[common], help="Jungck iteration on an affine problem")
    s.add_argument("--config", required=True)
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("solve-tvs", parents=[common], help="Jungck iteration with cone gauges")
    s.add_argument("--config", required=True)
    s.set_defaults(func=cmd_solve_tvs)

    s = sub.add_parser("selftest", parents=[common], help="run the invariant suites")
    s.add_argument("--suite", action="append", choices=list(SUITES),
                   help="suite to run (repeatable; default all)")
    s.set_defaults(func=cmd_selftest)
    return p


def _summary(command, payload, code) -> str:
    if command == "selftest":
        lines = []
        for suite, checks in payload["suites"].items():
            for name, c in checks.items():
                lines.append(f"{'PASS' if c['passed'] else 'FAIL'} {suite}.{name} "
                             f"({c['failures']}/{c['samples']} failures)")
        return "\n".join(lines)
    if command in ("solve", "solve-tvs"):
        return (f"{payload['status']} after {payload['iterations']} iterations; "
                f"limit {payload['limit']}, {len(payload['contraction_violations'])} contraction violations")
    return f"{command}: exit {code}"


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args.seed = resolve_seed(args.seed)
        payload, code = args.func(args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except (ConescaleError, ValueError, KeyError, TypeError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}))
        return 1
    print(json.dumps(jsonable(payload)))
    if args.verbose:
        print(_summary(args.command, payload, code), file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
