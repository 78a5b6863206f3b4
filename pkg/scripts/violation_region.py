"""Violation interval and peak of g, plus S'_QM at the peak for a few detector settings."""

import math

from extch.quantum import DetectorParams, find_max_violation, find_violation_interval, sprime_closed_form

SETTINGS = [(1, 1, 1, 1), (0.8, 0.7, 0.9, 0.95), (0.3, 0.3, 0.5, 0.9), (0.1, 0.1, 0.5, 0.5)]

if __name__ == "__main__":
    lo, hi = find_violation_interval()
    phi, g = find_max_violation()
    print(f"g > 0 on ({lo:.6f}, {hi:.10f}) rad = (0, {math.degrees(hi):.4f} deg)")
    print(f"peak g = {g:.12f} at phi = {phi:.12f} rad")
    print()
    print(f"{'eta1':>6}{'eta2':>6}{'f':>6}{'F':>6}{'S_max':>14}{'S_max/scale':>14}")
    for s in SETTINGS:
        dp = DetectorParams(*s)
        val = sprime_closed_form(dp, phi)
        print(f"{s[0]:>6}{s[1]:>6}{s[2]:>6}{s[3]:>6}{val:>14.8f}{val / dp.scale:>14.10f}")
