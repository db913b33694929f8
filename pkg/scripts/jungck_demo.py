"""Jungck iteration on scalar affine pairs f(x) = F x + b, g(x) = G x.

Sweeps the contraction ratio |F|/G and the gauge slope k, and reports
iterations, the a-priori orbit bound r0 against the observed diameter,
and the number of contraction-check violations. A ratio above k is
expected to trip the checker.
"""

import argparse
import json
from dataclasses import asdict, dataclass

import numpy as np

from conescale import gauges
from conescale.fixed_point import EuclideanMetric, JungckProblem, affine, jungck_solve


@dataclass
class DemoConfig:
    ratios: tuple = (0.1, 0.5, 0.9, 1.0)
    slopes: tuple = (0.5, 0.95)
    offset: float = 1.0
    g_scale: float = 2.0
    x0: float = 0.0
    max_iter: int = 2000


def run(cfg: DemoConfig):
    g = affine([[cfg.g_scale]])
    for ratio in cfg.ratios:
        for k in cfg.slopes:
            f = affine([[ratio * cfg.g_scale]], [cfg.offset])
            p = JungckProblem(EuclideanMetric(), f, g, g.preimage, [gauges.linear(k)] * 5,
                              np.array([cfg.x0]), max_iter=cfg.max_iter)
            r = jungck_solve(p)
            yield {
                "ratio": ratio, "k": k, "status": r.status, "iterations": r.iterations,
                "limit": r.limit.tolist() if r.converged else None,
                "r0_bound": r.r0_bound, "orbit_diameter": r.observed_orbit_diameter,
                "violations": len(r.contraction_violations),
            }


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-iter", type=int, default=DemoConfig.max_iter)
    ap.add_argument("--x0", type=float, default=DemoConfig.x0)
    args = ap.parse_args()
    cfg = DemoConfig(max_iter=args.max_iter, x0=args.x0)
    print(json.dumps({"config": asdict(cfg)}))
    for row in run(cfg):
        print(json.dumps(row))


if __name__ == "__main__":
    main()
