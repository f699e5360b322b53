"""Follow log M_t / log t along t_n = exp(e^n) and compare with t^alpha(t).

M_t is the last time before t at which |W| reaches its running maximum. Its
scaled logarithm u_t = log M_t / log t has a limit law with mass near 0, so
along a sparse sequence of horizons a path keeps dropping to a small fraction
of log t. The integral test decides whether M_t < t^alpha(t) happens
infinitely often. This script prints, per horizon, the distribution of u_t
and the fraction of paths with u_t < alpha(t_n), next to the limit-law value
F(alpha), for a converging and a diverging alpha family.

Near zero the limit density behaves like (4/pi^2) log(1/u), so
F(alpha) is about (4/pi^2) alpha log(1/alpha). Along t_n with alpha = n^-p that
is summable for p = 2 and not for p = 1, which is the heuristic behind the two
verdicts. Both columns shrink; six horizons say nothing rigorous about the
lim inf, and the table is only a picture.

    python3 demos/maxtime_trajectory.py [paths]
"""

import math
import sys

import numpy as np

from windinglab import (AlphaFamily, SeedStream, default_u_cap, integral_test, maxtime_cdf,
                        simulate_observables)
from windinglab.batch import u_values

PATHS = int(sys.argv[1]) if len(sys.argv) > 1 else 400
LOG_T = [math.exp(n) for n in range(1, 7)]
FAMILIES = [AlphaFamily.inv_loglog_pow(1, 2), AlphaFamily.inv_loglog_pow(1, 1)]


def main():
    cap = default_u_cap(LOG_T[-1], 1e4)
    rows = np.array([simulate_observables(SeedStream(2718, i), 1e-2, LOG_T, cap)
                     for i in range(PATHS)])
    kept = rows[:, -1, 5] == 0
    print(f"{kept.sum()} of {PATHS} paths uncensored at log t = e^6\n")

    for fam in FAMILIES:
        print(f"{fam.label}: {integral_test(fam).classification.value}")

    header = f"{'n':>2} {'log t':>8} {'median u':>9} {'P(u<0.05)':>10}"
    header += "".join(f" {f.label + ' emp / F(a)':>34}" for f in FAMILIES)
    print("\n" + header)
    for n, log_t in enumerate(LOG_T, start=1):
        u = u_values(rows[kept, n - 1, 2], log_t)
        line = f"{n:>2} {log_t:>8.2f} {np.median(u):>9.3f} {np.mean(u < 0.05):>10.3f}"
        for fam in FAMILIES:
            if n < fam.start:
                line += f" {'-':>34}"
            else:
                alpha = float(fam(n))
                line += f" {np.mean(u < alpha):>25.3f} / {maxtime_cdf(alpha):.3f}"
        print(line)

    print("\nfirst five paths, u_t by horizon:")
    for path in rows[kept][:5]:
        u = [u_values(path[h, 2:3], log_t)[0] for h, log_t in enumerate(LOG_T)]
        print("  " + " ".join(f"{v:6.3f}" for v in u))


if __name__ == "__main__":
    main()
