"""Many different networks reach zero loss on the same data.

The constructors have free parameters: apex offsets for the clustered
builder and apertures for the sequential one.  Drawing them at random and
rebuilding shows that every draw interpolates, so the zero-loss set is not
a single point.
"""

import numpy as np

from zeroloss import build_clustered, degeneracy_probe, gen_clustered
from zeroloss.construct import ClusteredOptions

ds = gen_clustered(seed=1, M=5, Q=3, points_per_class=100, spread=0.5)
for builder in ("clustered", "sls"):
    report = degeneracy_probe(ds, builder, k=20, seed=0)
    print(f"{builder:9s}: {report.passes}/{report.k} random rebuilds interpolate")

a, _ = build_clustered(ds, ClusteredOptions(mu_fractions=2.1))
b, _ = build_clustered(ds, ClusteredOptions(mu_fractions=2.9))
gap = max(float(np.abs(Wa - Wb).max()) for Wa, Wb in zip(a.biases, b.biases))
print(f"two of them differ by up to {gap:.3f} in their biases")
