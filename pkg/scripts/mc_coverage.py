"""Coverage of the 3-sigma interval for the Monte Carlo S' estimate over many seeds.

usage: python scripts/mc_coverage.py [n_events] [n_seeds] [eta1 eta2 f F]
"""

import math
import sys

import numpy as np

from extch.core import AngleConfig
from extch.montecarlo import SimConfig, check_assumption_a, run_experiment
from extch.quantum import DetectorParams, sprime_closed_form

if __name__ == "__main__":
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 100_000
    seeds = int(sys.argv[2]) if len(sys.argv) > 2 else 100
    dp = DetectorParams(*map(float, sys.argv[3:7])) if len(sys.argv) > 6 else DetectorParams()
    phi = math.pi / 4
    target = sprime_closed_form(dp, phi)
    z, a_ok = [], 0
    for seed in range(seeds):
        rep = run_experiment(SimConfig(dp, AngleConfig.from_phi(phi), n, seed))
        z.append((rep.sprime_estimate - target) / rep.sprime_std_error)
        a_ok += check_assumption_a(rep).passed
    z = np.array(z)
    print(f"target S' = {target:.8f}, n = {n}, seeds = {seeds}")
    print(f"standardized error: mean {z.mean():+.3f}, sd {z.std(ddof=1):.3f}")
    print(f"within 3 SE: {np.mean(np.abs(z) <= 3):.3f}; assumption-A pass: {a_ok}/{seeds}")
