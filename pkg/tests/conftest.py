import numpy as np


def random_weighted_graph(rng, n, density=0.5, low=-2.0, high=2.0,
                          min_abs=1e-3):
    """Symmetric zero-diagonal weight matrix with entries in [low, high],
    weights nudged away from zero so edges never silently vanish."""
    dense = np.zeros((n, n))
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < density:
                w = rng.uniform(low, high)
                if abs(w) < min_abs:
                    w = min_abs if w >= 0 else -min_abs
                dense[u, v] = dense[v, u] = w
    return dense


def nonempty_weighted_graph(rng, n, **kwargs):
    while True:
        dense = random_weighted_graph(rng, n, **kwargs)
        if np.count_nonzero(dense):
            return dense


def complete_graph(n):
    return np.ones((n, n)) - np.eye(n)
