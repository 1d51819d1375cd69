"""Regenerates gaussian_delta.csv: tight δ of the Gaussian mechanism at 50 digits."""
import random

import mpmath as mp

mp.mp.dps = 50
rng = random.Random(20191)


def log_uniform(lo, hi):
    return float(mp.e ** (mp.log(lo) + rng.random() * (mp.log(hi) - mp.log(lo))))


rows = []
while len(rows) < 100:
    sigma, sens, eps = log_uniform(0.3, 30.0), log_uniform(0.1, 10.0), log_uniform(0.05, 10.0)
    a = mp.mpf(sens) / (2 * mp.mpf(sigma))
    b = mp.mpf(eps) * mp.mpf(sigma) / mp.mpf(sens)
    delta = mp.ncdf(a - b) - mp.e ** mp.mpf(eps) * mp.ncdf(-a - b)
    if 1e-12 <= delta <= 0.1:
        rows.append((sigma, sens, eps, float(delta)))

with open("gaussian_delta.csv", "w") as f:
    f.write("sigma,sensitivity,epsilon,delta\n")
    for r in rows:
        f.write(",".join(repr(x) for x in r) + "\n")
