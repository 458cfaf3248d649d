import numpy as np

from kmstab import kmeans


def random_instance(rng, n_max=50, d_max=3, k_max=5, margin=1e-4):
    """Data and centers with every point at least ``margin`` off all equidistance sets."""
    while True:
        n = int(rng.integers(2, n_max + 1))
        d = int(rng.integers(1, d_max + 1))
        k = int(rng.integers(1, min(k_max, n) + 1))
        X = rng.normal(size=(n, d)) * rng.uniform(0.5, 5)
        C = X[rng.choice(n, k, replace=False)] + rng.normal(scale=0.3, size=(k, d))
        if not kmeans.on_boundary(X, C, margin):
            return X, C
