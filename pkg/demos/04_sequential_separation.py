"""Data that is not clustered but can be peeled off one class at a time.

find_sls_certificate looks for an order of the classes such that each one
is cut off by a hyperplane through a point between its mean and the
barycenter.  build_sls turns the certificate into cone layers.  When no
order works, the search reports the best margin it reached for each prefix.
"""

import numpy as np

from zeroloss import LabeledDataset, SLSOptions, build_sls, certify, check_clustered, find_sls_certificate, gen_sls
from zeroloss.dataset import all_certified_orderings
from zeroloss.errors import NotSeparableError

ds = gen_sls(seed=3, M=4, Q=3, points_per_class=120)
print("clustered:", check_clustered(ds).passes)
cert = find_sls_certificate(ds)
print("ordering:", cert.ordering, " margins:", np.round(cert.margins, 3))
print("orderings that admit a certificate:", all_certified_orderings(ds))

for alpha in (0.1, 0.9):
    net, _ = build_sls(ds, cert, SLSOptions(alpha=alpha))
    print(f"alpha {alpha}: worst label error {certify(net, ds).max_entry_residual:.1e}")

xor = LabeledDataset((np.array([[1.0, -1.0, 0.5], [1.0, -1.0, 0.5]]), np.array([[1.0, -1.0], [-1.0, 1.0]])))
try:
    find_sls_certificate(xor)
except NotSeparableError as exc:
    print("\nXOR:", exc)
    for a in exc.report.attempts:
        found = "no separating direction" if a.best_margin == -float("inf") else f"best margin {a.best_margin:.3f}"
        print(f"  class {a.prefix[-1]} first: {found}")
