"""Prepare a Bell pair and compare sampled counts with the exact distribution.

The noiseless run produces only "00" and "11".  With depolarizing and
readout noise switched on, the forbidden outcomes appear at rates the
density-matrix oracle predicts exactly.
"""

from qguard import NoiseModel, density_matrix_oracle, phi_plus, run_shots

SHOTS = 20_000


def show(label, noise):
    counts = run_shots(phi_plus(), SHOTS, noise)
    exact = density_matrix_oracle(phi_plus(), noise)
    print(f"{label}:")
    print(f"  {'outcome':>7}  {'sampled':>8}  {'exact':>8}")
    for outcome in sorted(exact):
        frequency = counts.get(outcome, 0) / SHOTS
        print(f"  {outcome:>7}  {frequency:8.4f}  {exact[outcome]:8.4f}")


def main():
    show("noiseless", NoiseModel.ideal(seed=1))
    show("noisy (p1=0.01, p2=0.05, readout=0.03)",
         NoiseModel(p1=0.01, p2=0.05, readout_flip=0.03, seed=1))


if __name__ == "__main__":
    main()
