"""Show that the cusp deformation has no formal first integral, for a range of truncations.

    python scripts/cusp_obstruction.py --degrees 6 8 10 --torder 2
"""

import argparse
import time
from dataclasses import dataclass, field
from typing import List

from germforge.forms import PForm
from germforge.normalizer import DeformationFamily, check_cascade, normalize
from germforge.ring import Jet
from germforge.solver import ObstructionCertificate, render_certificate


@dataclass
class Config:
    degrees: List[int] = field(default_factory=lambda: [6, 8, 10])
    torder: int = 1
    names: List[str] = field(default_factory=lambda: ["x", "y", "z"])


def cusp_family(D: int, K: int) -> DeformationFamily:
    x, y = Jet.var(3, D + 1, 0), Jet.var(3, D + 1, 1)
    f0 = y * y + x * x * x
    xs, ys = x.truncate(D), y.truncate(D)
    w1 = PForm.one_form([(xs * ys).scale(-3), (xs * xs).scale(2), Jet.zero(3, D)])
    zeros = [PForm.zero(1, 3, D)] * (K - 1)
    return DeformationFamily(f0, [w1] + zeros)


def main(cfg: Config):
    for D in cfg.degrees:
        fam = cusp_family(D, cfg.torder)
        start = time.perf_counter()
        cascade = check_cascade(fam)
        out = normalize(fam)
        elapsed = time.perf_counter() - start
        print(f"D={D} K={cfg.torder}: cascade {'passes' if cascade.passed else 'fails'}, {elapsed * 1000:.1f} ms")
        if isinstance(out, ObstructionCertificate):
            print(f"  obstruction at t-order {out.t_order}, degree {out.degree}, valid={out.is_valid()}")
            for line in render_certificate(out, cfg.names).splitlines():
                print("  " + line)
        else:
            print("  normalized (unexpected)")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--degrees", type=int, nargs="+", default=Config().degrees)
    ap.add_argument("--torder", type=int, default=Config.torder)
    ns = ap.parse_args()
    main(Config(degrees=ns.degrees, torder=ns.torder))
