"""Conversion efficiency at resonance against C1 = C2 for all three schemes.

Writes one CSV per scheme plus a side-by-side table on stdout. The pure
schemes stay at eta1*eta2 for every C while the baseline needs C >> 1.

    python scripts/efficiency_vs_cooperativity.py --out results/
"""

import argparse
from pathlib import Path

import numpy as np

from darkline import sweep
from darkline.model import simple_config


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--out", default="results")
    ap.add_argument("--num", type=int, default=25)
    ap.add_argument("--eta", type=float, default=1.0)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    cs = np.geomspace(1e-2, 1e3, args.num)
    eta = (args.eta, args.eta)
    bases = {
        "baseline": simple_config("baseline", eta=eta, c=(1, 1)),
        "weak_drive": simple_config("weak_drive", eta=eta, c=(1, 1), c3=1.0),
        # kappa well above gamma_m (1 + 2 C) keeps lambda* stable over the whole axis
        "parametric": simple_config("parametric", kappa=(1e6, 1e6), eta=eta, c=(1, 1)),
    }
    table = {}
    for name, base in bases.items():
        spec = sweep.SweepSpec(base, sweep.Axis(("c1", "c2"), cs),
                               apply_nulling=name != "baseline")
        rows = sweep.run_sweep(spec)
        sweep.write_csv(rows, out / f"efficiency_{name}.csv", spec)
        table[name] = [r.chi for r in rows]

    print(f"{'C':>10} " + " ".join(f"{n:>12}" for n in table))
    for i, c in enumerate(cs):
        print(f"{c:10.4g} " + " ".join(f"{table[n][i]:12.8f}" for n in table))


if __name__ == "__main__":
    main()
