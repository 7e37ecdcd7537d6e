"""Second-order tilt coefficient over (1/alpha, phi) for one and three XY-8 units.

For a weak field the engine coefficient is (P(phi) - P(pi/2)) / beta^2, which
removes the phase-independent part. The closed-form single- and three-unit
expressions are written alongside.
"""

import argparse
import csv

import numpy as np

from ddphase.classical import ClassicalSignal, classical_propagator
from ddphase.core import SensorPreparation, transition_probability
from ddphase.oracles import oracle_second_order_single, oracle_second_order_triple
from ddphase.sequences import SequenceKind, build_standard

MHZ = 2 * np.pi * 1e6


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--signal-ratio", type=float, default=0.01)
    ap.add_argument("--beta", type=float, default=1e-4)
    ap.add_argument("--inv-alpha", type=int, default=61, help="grid points in 1/alpha over [0.2, 1]")
    ap.add_argument("--phis", type=int, default=37)
    ap.add_argument("--out", default="second_order_maps.csv")
    args = ap.parse_args()

    omega_ac = MHZ
    amplitude = args.signal_ratio * omega_ac
    rabi = amplitude / args.beta
    signal = ClassicalSignal(amplitude, omega_ac)
    phis = np.linspace(0, 2 * np.pi, args.phis)
    with open(args.out, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["inv_alpha", "phi", "units", "engine", "expansion"])
        for inv in np.linspace(0.2, 1.0, args.inv_alpha):
            alpha = 1 / inv
            for units, oracle in ((1, oracle_second_order_single), (3, oracle_second_order_triple)):
                seq = build_standard(SequenceKind.XY8, units, np.pi / (alpha * omega_ac), np.pi / rabi)
                U = classical_propagator(seq, signal)
                base = transition_probability(U, SensorPreparation(np.pi / 2))
                for phi in phis:
                    coef = (transition_probability(U, SensorPreparation(phi)) - base) / args.beta**2
                    out.writerow([f"{inv:.17g}", f"{phi:.17g}", units, f"{coef:.17g}", f"{oracle(alpha, phi):.17g}"])
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
