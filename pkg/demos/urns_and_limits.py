"""Urns behind the degrees of preferential attachment trees.

The root degree of a preferential attachment tree is the red count of an
urn with immigration.  Its scaling limit is Mittag-Leffler, and the limits
of all vertex degrees form a Markov chain whose moments are available in
closed form.

Run with ``python demos/urns_and_limits.py``.
"""
import numpy as np

from wrtlab import (
    immigration_fluctuation_samples,
    limit_chain_moment,
    limit_chain_spec,
    make_constant_fitness,
    make_periodic_fitness,
    ml_moment,
    run_immigration_urn,
    sample_ipggp,
    ipggp_scale,
)

rng = np.random.default_rng(3)
fit = make_constant_fitness(1, 1, 10**6)
r = np.array([run_immigration_urn(fit, 10**6, rng).red[-1] for _ in range(500)]) / 1e3
print(f"R_n / sqrt(n) at n = 1e6: mean {r.mean():.3f}, second moment {np.mean(r**2):.3f}")
print(f"Mittag-Leffler(1/2, 1/2):  mean {ml_moment(0.5, 0.5, 1):.3f}, second moment "
      f"{ml_moment(0.5, 0.5, 2):.3f}")

x = immigration_fluctuation_samples(fit, 1.0, 10**4, 100, 5000, rng)
print(f"\nstandardized fluctuations: mean {x.mean():.3f}, variance {x.var():.3f}, "
      f"skewness {np.mean((x - x.mean())**3) / x.std()**3:.3f}")

pattern = [0, 1]
spec = limit_chain_spec(make_periodic_fitness(1, pattern, 10))
g = sample_ipggp(1.0, pattern, 4, rng, size=10**5) * ipggp_scale(pattern)
print("\nfitness (1, 0, 1, 0, ...): first moments of the degree limits")
for k in range(1, 5):
    print(f"  k = {k}: Gamma-process sample {g[:, k - 1].mean():.4f}, "
          f"closed form {limit_chain_moment(spec, k, 1):.4f}")
