"""Time normalization of random families u * d(f0 + t g + t^2 g2) and check the first integrals.

    python scripts/roundtrip_benchmark.py --instances 100 --degree 8
"""

import argparse
import random
import statistics
import time
from dataclasses import dataclass
from fractions import Fraction

from germforge.forms import TForm, twedge
from germforge.normalizer import DeformationFamily, NormalizationResult, normalize
from germforge.ring import Jet, TPoly, monomials_up_to


@dataclass
class Config:
    instances: int = 100
    degree: int = 8
    seed: int = 0
    max_g_degree: int = 4
    max_u_degree: int = 2


def base_functions(D: int):
    x, y, z = (Jet.var(3, D + 1, i) for i in range(3))
    return {
        "x^2+y^2+z^2": x * x + y * y + z * z,
        "x^3+y^3+z^3": x ** 3 + y ** 3 + z ** 3,
        "x^2+y^3+z^5": x * x + y ** 3 + z ** 5,
    }


def random_jet(rng, D, top, lowest, terms):
    monos = [e for e in monomials_up_to(3, top) if sum(e) >= lowest]
    picked = rng.sample(monos, terms)
    return Jet(3, D, {e: Fraction(rng.randint(-4, 4) or 1, rng.randint(1, 3)) for e in picked})


def main(cfg: Config):
    rng = random.Random(cfg.seed)
    D = cfg.degree
    bases = base_functions(D)
    times = {name: [] for name in bases}
    for _ in range(cfg.instances):
        name = rng.choice(sorted(bases))
        f0 = bases[name]
        g = random_jet(rng, D + 1, cfg.max_g_degree, 1, 3)
        g2 = random_jet(rng, D + 1, cfg.max_g_degree, 1, 2)
        u = TPoly([Jet.one(3, D)] + [random_jet(rng, D, cfg.max_u_degree, 0, 2) for _ in range(2)])
        om = TForm.from_tpoly(TPoly([f0, g, g2])).d_x().times(u)
        fam = DeformationFamily(f0, om.coeffs[1:])
        start = time.perf_counter()
        res = normalize(fam)
        times[name].append(time.perf_counter() - start)
        assert isinstance(res, NormalizationResult)
        dF = TForm.from_tpoly(res.F).d_x()
        assert twedge(fam.as_tform(), dF).truncate(res.trusted_degree).is_zero()
    total = sum(sum(v) for v in times.values())
    print(f"{cfg.instances} instances at D={D}, K=2: {total:.2f} s total")
    for name, ts in times.items():
        if ts:
            print(f"  {name:14s} n={len(ts):3d}  mean {statistics.mean(ts) * 1000:7.1f} ms  max {max(ts) * 1000:7.1f} ms")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--instances", type=int, default=Config.instances)
    ap.add_argument("--degree", type=int, default=Config.degree)
    ap.add_argument("--seed", type=int, default=Config.seed)
    ns = ap.parse_args()
    main(Config(instances=ns.instances, degree=ns.degree, seed=ns.seed))
