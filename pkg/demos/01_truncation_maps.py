"""A ReLU layer seen as a map on input space.

Each hidden activation of a network with surjective weights can be rebuilt
from a chain of truncation maps x -> pinv(W) (relu(W x + b) - b) applied in
input space, followed by one affine map.  This script checks that on a
random network and prints the projector chain that the weights induce.
"""

import numpy as np

from zeroloss import cumulative_from_layers, pinv, projector_chain, tau_chain
from zeroloss.netcore import layer_outputs
from zeroloss.netcore import LayerNet
from zeroloss.numlin import penrose_residuals

rng = np.random.default_rng(0)
widths = [6, 5, 5, 3, 2]
net = LayerNet(tuple(rng.standard_normal((widths[i + 1], widths[i])) for i in range(4)),
               tuple(rng.standard_normal(widths[i + 1]) for i in range(4)))
print("layer widths:", net.widths)

W = net.weights[0]
print("Penrose residuals of pinv(W_1):", ["%.1e" % r for r in penrose_residuals(W, pinv(W))])

cnet = cumulative_from_layers(net)
X = rng.standard_normal((6, 500))
acts = layer_outputs(net, X)
for l, Z in enumerate(tau_chain(cnet, X), start=1):
    rebuilt = cnet.weights[l - 1] @ Z + cnet.biases[l - 1][:, None]
    print(f"layer {l}: activations rebuilt from truncated inputs, max error {np.abs(rebuilt - acts[l - 1]).max():.1e}")

for l, P in enumerate(projector_chain(cnet), start=1):
    print(f"P^({l}) has rank {np.linalg.matrix_rank(P)} (cumulative width {cnet.widths[l]})")
