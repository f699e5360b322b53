"""Quantiles of the winding angle against the two Cauchy limits.

At the first exit from the disc of radius r the angle is exactly Cauchy with
scale log r. At a fixed time t the scaled angle 2 theta_t / log t is only
asymptotically Cauchy, and slowly so. The table shows both side by side.

    python3 demos/winding_quantiles.py [draws]
"""

import math
import sys

import numpy as np

from windinglab import SeedStream, default_u_cap, sample_hits, simulate_observables

DRAWS = int(sys.argv[1]) if len(sys.argv) > 1 else 4000
PROBS = (0.1, 0.25, 0.75, 0.9, 0.99)


def cauchy_quantile(p, scale=1.0):
    return scale * math.tan(math.pi * (p - 0.5))


def main():
    print("hitting angle / log r")
    for level in (1.0, 4.0):
        theta, censored = sample_hits(5, math.exp(level), DRAWS, 1e-2,
                                      default_u_cap(2 * level, 1e4), first_index=0)
        q = np.quantile(theta[~censored] / level, PROBS)
        print(f"  log r = {level:<4g} " + "  ".join(f"{v:+7.3f}" for v in q))

    log_ts = (5.0, 20.0, 80.0)
    cap = default_u_cap(log_ts[-1], 1e4)
    rows = np.array([simulate_observables(SeedStream(6, i), 1e-2, log_ts, cap)
                     for i in range(DRAWS)])
    print("2 theta_t / log t")
    for h, log_t in enumerate(log_ts):
        ok = rows[:, h, 5] == 0
        q = np.quantile(2 * rows[ok, h, 0] / log_t, PROBS)
        print(f"  log t = {log_t:<4g} " + "  ".join(f"{v:+7.3f}" for v in q))
    print("Cauchy(1)    " + "  ".join(f"{cauchy_quantile(p):+7.3f}" for p in PROBS))


if __name__ == "__main__":
    main()
