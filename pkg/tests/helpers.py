"""Random objects shared by several test modules."""

import numpy as np

from zeroloss.netcore import LayerNet


def random_decreasing_widths(rng, max_in=8, max_depth=5):
    d0 = int(rng.integers(2, max_in + 1))
    depth = int(rng.integers(1, max_depth + 1))
    widths = [d0]
    for _ in range(depth):
        widths.append(int(rng.integers(1, widths[-1] + 1)))
    return widths


def random_layernet(rng, widths, bias_scale=1.0):
    Ws = [rng.standard_normal((widths[i + 1], widths[i])) for i in range(len(widths) - 1)]
    bs = [bias_scale * rng.standard_normal(widths[i + 1]) for i in range(len(widths) - 1)]
    return LayerNet(tuple(Ws), tuple(bs))


def naive_forward(net, X):
    """Column-by-column evaluation with explicit loops, independent of the vectorised path."""
    out = []
    for col in np.asarray(X, dtype=float).T:
        z = list(col)
        for li, (W, b) in enumerate(zip(net.weights, net.biases)):
            nxt = []
            for r in range(W.shape[0]):
                acc = b[r]
                for c in range(W.shape[1]):
                    acc += W[r, c] * z[c]
                if li < net.depth - 1:
                    acc = acc if acc > 0 else 0.0
                nxt.append(acc)
            z = nxt
        out.append(z)
    return np.array(out).T
