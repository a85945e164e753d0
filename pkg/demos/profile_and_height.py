"""Profile and height of weighted recursive trees.

For weights with ``W_n ~ C n^gamma`` the profile is close to a Gaussian
centred at ``gamma log n`` and the height grows like
``gamma exp(z_+) log n``, where ``z_+`` is the positive root of
``1 + gamma (e^z - 1 - z e^z)``.

Run with ``python demos/profile_and_height.py``.
"""
import math

import numpy as np

from wrtlab import (
    gaussian_profile_prediction,
    grow_wrt,
    make_power_weights,
    profile,
    profile_asymptotics,
)

rng = np.random.default_rng(2)
n = 10**6
w = make_power_weights(1, 1, n)
tree, _ = grow_wrt(w, n, rng)
prof = profile(tree)
pred = gaussian_profile_prediction(n, 1.0, np.arange(len(prof.counts)))

print(f"uniform recursive tree, n = {n}")
print(" k   count   prediction")
for k in range(0, len(prof.counts), 2):
    print(f"{k:2d} {prof.counts[k]:7d} {pred[k]:11.0f}")

print("\nheight / log n against the limiting constant")
for gamma in (0.5, 1.0, 2.0):
    w = make_power_weights(gamma, 1, n)
    h = np.mean([grow_wrt(w, n, rng)[0].height for _ in range(5)])
    const = profile_asymptotics(gamma).height_constant
    print(f"  gamma = {gamma}: {h / math.log(n):.3f} (limit {const:.3f})")
