#!/usr/bin/env python
"""
Run the command-line examples end to end.
Writes every published figure's plot data under exps/figures/data/.
"""

import subprocess
import sys

CLI = [sys.executable, "-m", "ramancomb.interface"]


def run_example(description, command, expected=0):
    """Run an example command and report whether it exited as expected."""
    print(f"\n{'='*60}")
    print(f"Example: {description}")
    print(f"{'='*60}")
    print(f"Command: {' '.join(command[2:])}")
    print("-" * 40)

    result = subprocess.run(command, capture_output=True, text=True)
    print(result.stdout[:2000])
    if result.stderr:
        print("Log:", result.stderr[:500])

    return result.returncode == expected


def main():
    examples = [
        (
            "Fock(5) probe, mean and Gamma^(2) ratios",
            CLI + ["run", "--config", "exps/figures/fig2.json", "--out", "exps/figures/data/fig2.csv"],
        ),
        (
            "Fock(5) and thermal light mixed, g^(2) of sidebands -1 and 2",
            CLI + ["run", "--config", "exps/figures/fig4.json", "--out", "exps/figures/data/fig4.json",
                   "--format", "json", "--jobs", "4"],
        ),
        (
            "Squeezing transfer from a bright coherent neighbour",
            CLI + ["run", "--config", "exps/figures/fig6.json", "--out", "exps/figures/data/fig6.csv"],
        ),
        ("Every panel of the two-photon figure", CLI + ["figure", "fig7", "--out", "exps/figures/data"]),
        ("Zeros of the coincidence probability", CLI + ["zeros", "--max-kappa-L", "5", "--count", "3"]),
        (
            "Single-photon scenario against the Fock-space oracle",
            CLI + ["oracle-check", "--config", "exps/figures/single_photon_oracle.json", "--window", "12"],
        ),
        (
            "A window too narrow for the oracle is refused",
            CLI + ["oracle-check", "--config", "exps/figures/single_photon_oracle.json", "--window", "1"],
            4,
        ),
    ]

    success_count = 0
    for description, command, *expected in examples:
        if run_example(description, command, *expected):
            success_count += 1
            print("Example completed as expected")
        else:
            print("Example failed")

    print(f"\n{'='*60}")
    print(f"Results: {success_count}/{len(examples)} examples as expected")
    print(f"{'='*60}")

    return 0 if success_count == len(examples) else 1


if __name__ == "__main__":
    sys.exit(main())
