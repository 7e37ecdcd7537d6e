"""Hydrogen and 13C near alpha = 1/3 at 1836 G with third-harmonic AXY-8.

The hydrogen line should stay put between the two initial phases while the
carbon line moves.
"""

import argparse

import numpy as np

from ddphase.disambiguation import classify_peaks, run_sweep
from ddphase.io import rows_from_sweep, write_results
from ddphase.validation import hydrogen_carbon_config


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--start", type=float, default=0.32)
    ap.add_argument("--stop", type=float, default=0.35)
    ap.add_argument("--points", type=int, default=301)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="hydrogen_carbon.csv")
    args = ap.parse_args()

    cfg = hydrogen_carbon_config(np.linspace(args.start, args.stop, args.points))
    pcs = run_sweep(cfg, workers=args.workers)
    write_results(rows_from_sweep(pcs, cfg.omega_ref), args.out, phases=cfg.phases)
    print(f"wrote {args.out}")
    for p in classify_peaks(pcs).peaks:
        k, l = p.harmonic_guess
        print(f"alpha {p.alpha_at_peak:.5f}  height {p.height:.3f}  W/h {p.ratio:.3f}  {p.classification.value}  ~{k}/{l}")


if __name__ == "__main__":
    main()
