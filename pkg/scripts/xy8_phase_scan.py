"""Transition probability of one XY-8 unit against the initial phase at alpha = 1, 2, 4.

Writes engine values next to the closed-form tilt expansions.
"""

import argparse
import csv

import numpy as np

from ddphase.classical import ClassicalSignal, classical_propagator
from ddphase.core import SensorPreparation, transition_probability
from ddphase.oracles import oracle_alpha1, oracle_alpha2, oracle_alpha4, tilt_input_for
from ddphase.sequences import SequenceKind, build_standard

MHZ = 2 * np.pi * 1e6
ORACLES = {1: oracle_alpha1, 2: oracle_alpha2, 4: oracle_alpha4}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--amplitude-mhz", type=float, default=0.12)
    ap.add_argument("--rabi-mhz", type=float, default=10.0)
    ap.add_argument("--points", type=int, default=181)
    ap.add_argument("--out", default="xy8_phase_scan.csv")
    args = ap.parse_args()

    omega_ac, amplitude, rabi = MHZ, args.amplitude_mhz * MHZ, args.rabi_mhz * MHZ
    signal = ClassicalSignal(amplitude, omega_ac)
    phis = np.linspace(0, 2 * np.pi, args.points)
    with open(args.out, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["alpha", "phi", "p_engine", "p_expansion"])
        for alpha, oracle in ORACLES.items():
            seq = build_standard(SequenceKind.XY8, 1, np.pi / (alpha * omega_ac), np.pi / rabi)
            U = classical_propagator(seq, signal)
            for phi in phis:
                p = transition_probability(U, SensorPreparation(phi))
                ref = oracle(tilt_input_for(amplitude, omega_ac, rabi, phi=phi))
                out.writerow([alpha, f"{phi:.17g}", f"{p:.17g}", f"{ref:.17g}"])
            print(f"alpha={alpha}: max engine {max(transition_probability(U, SensorPreparation(f)) for f in phis):.4g}")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
