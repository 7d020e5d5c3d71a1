"""Bisected parametric instability threshold against the adiabatic estimate.

Scans kappa / gamma_eff from well below to well above 1 and reports where the
estimate gamma_m (1 + C1 + C2) / 2 holds and whether lambda* is stable.

    python scripts/threshold_scan.py --c 2 --out results/threshold.csv
"""

import argparse
import csv
from pathlib import Path

import numpy as np

from darkline import closedform, linsys
from darkline.cli import locate_threshold
from darkline.model import simple_config


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--c", type=float, default=2.0, help="C1 = C2")
    ap.add_argument("--num", type=int, default=21)
    ap.add_argument("--out", default="results/threshold.csv")
    args = ap.parse_args()
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)

    g_eff = 1.0 + 2.0 * args.c
    rows = []
    for ratio in np.geomspace(1e-2, 1e4, args.num):
        cfg = simple_config("parametric", kappa=(ratio * g_eff,) * 2, c=(args.c, args.c))
        est = closedform.parametric_threshold(cfg)
        found = locate_threshold(cfg, 0.0, 4.0 * est)
        star_ok = linsys.stability(closedform.apply_nulling(cfg))[0]
        rows.append((ratio, est, found, abs(found - est) / est, star_ok))
        print(f"kappa/gamma_eff {ratio:10.4g}  threshold {found:10.6g}  "
              f"estimate {est:8.4g}  gap {rows[-1][3]:8.2e}  lambda* stable {star_ok}")

    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["kappa_over_gamma_eff", "estimate", "bisected", "relative_gap", "lambda_star_stable"])
        for r in rows:
            w.writerow([format(r[0], ".17g"), format(r[1], ".17g"), format(r[2], ".17g"),
                        format(r[3], ".17g"), "true" if r[4] else "false"])


if __name__ == "__main__":
    main()
