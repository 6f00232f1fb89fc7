"""Survey Jacobian-ideal certification and quasi-homogeneity over a few classical germs.

    python scripts/singularity_survey.py --degree 12
"""

import argparse
from dataclasses import dataclass

from germforge.cli import run_text


@dataclass
class Config:
    degree: int = 10


GERMS = {
    "A1 (Morse)": "x^2 + y^2 + z^2",
    "A2": "x^2 + y^2 + z^3",
    "D4": "x^2*y - y^3 + z^2",
    "E6": "x^3 + y^4 + z^2",
    "Fermat cubic": "x^3 + y^3 + z^3",
    "x^2+y^3+z^5": "x^2 + y^3 + z^5",
    "cusp cylinder": "y^2 + x^3",
    "Whitney umbrella": "x^2 - y^2*z",
}


def main(cfg: Config):
    print(f"{'germ':18s} {'isolated':10s} {'k':>3s}  weights")
    for name, expr in GERMS.items():
        doc = run_text(f"vars x y z;\ndegree {cfg.degree};\npoly f = {expr};\ntask analyze-singularity(f);\n")
        p = doc["payload"]
        q = p["quasi_homogeneity"]
        k = p["k"] if p["k"] is not None else "-"
        weights = f"{tuple(q['weights'])}, d={q['d']}" if q["is_qh"] and q["strict"] else "none found"
        print(f"{name:18s} {p['status']:10s} {k!s:>3s}  {weights}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--degree", type=int, default=Config.degree)
    ns = ap.parse_args()
    main(Config(degree=ns.degree))
