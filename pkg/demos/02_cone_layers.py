"""One layer that keeps a cone and flattens its mirror image.

build_truncation_layer returns weights whose truncation map fixes every
point of the forward cone (apex p, axis h, aperture theta) and sends every
point of the backward cone to p.  Points elsewhere land somewhere between.
"""

import math

import numpy as np

from zeroloss import Cone, theta_n, truncate, w_theta
from zeroloss.construct import build_truncation_layer

print("widest cone around the diagonal inside the positive sector:")
for n in (2, 3, 4, 10):
    print(f"  n={n:2d}  theta_n = {theta_n(n):.6f}  ({math.degrees(theta_n(n)):.2f} deg)")

cone = Cone(np.array([1.0, -1.0, 0.5]), np.array([0.0, 0.6, 0.8]), 2.2)
W, b = build_truncation_layer(cone, 3, 3)
print("\nW W^T equals W_theta^2:", np.allclose(W @ W.T, w_theta(cone.aperture, 3) @ w_theta(cone.aperture, 3)))

ahead = cone.apex + 3 * cone.axis + np.array([0.4, 0.0, 0.0])
behind = cone.apex - 3 * cone.axis + np.array([0.4, 0.0, 0.0])
print("forward point  ", ahead, "->", truncate(W, b, ahead)[:, 0].round(12))
print("backward point ", behind, "->", truncate(W, b, behind)[:, 0].round(12), "(the apex)")

W2, b2 = build_truncation_layer(cone, 3, 2)
print("\nwith two output rows the forward cone is projected instead of fixed:")
print("  ", truncate(W2, b2, ahead)[:, 0].round(6), "= P x with P of rank", np.linalg.matrix_rank(np.linalg.pinv(W2) @ W2))
