"""How tight are the norm-equivalence constants in practice?

For each cone family and dimension, draws pairs of interior directions
(e, e2), computes the best constants and compares them with the extreme
ratios ||x||_e2 / ||x||_e seen over random x. Prints a JSON line per row.
"""

import argparse
import json
from dataclasses import asdict, dataclass

import numpy as np

from conescale import cones
from conescale.scalarization import equivalence_constants, norm_e
from conescale.selftest import random_polyhedral


@dataclass
class SweepConfig:
    seed: int = 0
    families: tuple = ("orthant", "lorentz", "polyhedral")
    dims: tuple = (2, 3, 5)
    direction_pairs: int = 5
    vectors: int = 400


def make_cone(family, dim, rng):
    if family == "orthant":
        return cones.orthant(dim)
    if family == "lorentz":
        return cones.lorentz(dim)
    return random_polyhedral(dim, rng)


def sweep(cfg: SweepConfig):
    rng = np.random.Generator(np.random.Philox(cfg.seed))
    for fam in cfg.families:
        for dim in cfg.dims:
            cone = make_cone(fam, dim, rng)
            for _ in range(cfg.direction_pairs):
                e, e2 = cones.sample_interior(cone, rng), cones.sample_interior(cone, rng)
                lo, up = equivalence_constants(cone, e, e2)
                ratios = []
                for _ in range(cfg.vectors):
                    x = cones.sample_vector(cone, rng)
                    n1 = norm_e(cone, e, x)
                    if n1 > 0:
                        ratios.append(norm_e(cone, e2, x) / n1)
                yield {
                    "family": fam, "dim": dim, "lower": lo, "upper": up,
                    "min_ratio": min(ratios), "max_ratio": max(ratios),
                    # 1.0 means random x already reach the constant
                    "lower_reached": lo / min(ratios), "upper_reached": max(ratios) / up,
                }


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=SweepConfig.seed)
    ap.add_argument("--vectors", type=int, default=SweepConfig.vectors)
    ap.add_argument("--pairs", type=int, default=SweepConfig.direction_pairs)
    args = ap.parse_args()
    cfg = SweepConfig(seed=args.seed, vectors=args.vectors, direction_pairs=args.pairs)
    print(json.dumps({"config": asdict(cfg)}))
    for row in sweep(cfg):
        print(json.dumps(row))


if __name__ == "__main__":
    main()
