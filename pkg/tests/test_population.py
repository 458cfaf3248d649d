import numpy as np
import pytest
from scipy.integrate import quad
from scipy.stats import norm

from kmstab.errors import DegenerateInputError
from kmstab.gmm1d import GaussianMixture1D
from kmstab.population import (
    population_fixed_point,
    population_update,
    population_update_batch,
    voronoi_cells,
)


def _quad_update(m, c):
    f = lambda u: sum(w * norm.pdf(u, mu, m.sigma) for w, mu in zip(m.weights, m.means))
    edges = [-np.inf, *((a + b) / 2 for a, b in zip(c, c[1:])), np.inf]
    out = []
    for lo, hi in zip(edges, edges[1:]):
        mass = quad(f, lo, hi, epsabs=1e-14)[0]
        out.append(quad(lambda u: u * f(u), lo, hi, epsabs=1e-14)[0] / mass)
    return np.array(out)


def test_cells_are_midpoint_delimited():
    cells = voronoi_cells([0.0, 2.0, 6.0])
    assert [(c.lo, c.hi) for c in cells] == [(-np.inf, 1.0), (1.0, 4.0), (4.0, np.inf)]


def test_update_matches_quadrature():
    m = GaussianMixture1D((0.3, 0.7), (0.0, 5.0), 1.1)
    for c in ([-1.0, 4.0], [0.5, 1.0, 6.0], [-2.0, 0.0, 3.0, 8.0]):
        assert population_update(m, c) == pytest.approx(_quad_update(m, c), abs=1e-8)


def test_single_center_goes_to_mixture_mean():
    m = GaussianMixture1D((0.3, 0.7), (0.0, 5.0))
    res = population_fixed_point(m, [17.0])
    assert res.converged and res.iterations == 1
    assert res.centers[0] == pytest.approx(m.mean, abs=1e-12)


def test_well_separated_fixed_point_sits_near_the_means():
    m = GaussianMixture1D.two_component(0.5, 10.0)
    res = population_fixed_point(m, [1.0, 8.0])
    assert res.converged
    # symmetric mixture: fixed point is symmetric about the midpoint
    assert res.centers[0] + res.centers[1] == pytest.approx(10.0, abs=1e-9)
    assert res.centers[0] == pytest.approx(0.0, abs=1e-6)
    assert population_update(m, res.centers) == pytest.approx(res.centers, abs=1e-9)


def test_batch_matches_scalar_path():
    m = GaussianMixture1D((0.2, 0.5, 0.3), (-3.0, 0.0, 4.0), 0.8)
    rng = np.random.default_rng(5)
    C = np.sort(rng.uniform(-6, 8, (50, 3)), axis=1)
    got = population_update_batch(m, C)
    ref = np.array([population_update(m, row) for row in C])
    assert got == pytest.approx(ref, abs=1e-12)


def test_unsorted_centers_rejected():
    m = GaussianMixture1D.two_component(0.5, 3.0)
    with pytest.raises(DegenerateInputError):
        population_update(m, [1.0, 0.0])
    with pytest.raises(DegenerateInputError):
        population_update(m, [1.0, 1.0])


def test_iteration_cap():
    m = GaussianMixture1D.two_component(0.3, 1.0)
    res = population_fixed_point(m, [-3.0, 4.0], tol=1e-300, max_iter=3)
    assert not res.converged and res.iterations == 3
