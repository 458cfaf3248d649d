import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from kmstab import kmeans
from kmstab.errors import DomainError, NondifferentiableError, SingularHessianError

from helpers import random_instance

X3 = [0.0, 1.0, 4.0]


def test_assign_examples():
    a = kmeans.assign(X3, [0.2, 3.0])
    assert a.labels.tolist() == [0, 0, 1] and a.counts.tolist() == [2, 1]
    assert kmeans.assign([0.5], [0.0, 1.0]).labels.tolist() == [0]
    a = kmeans.assign([2.0], [0.0, 1.5, 9.0])
    assert a.labels.tolist() == [1] and a.counts.tolist() == [0, 1, 0]


def test_dimension_mismatch():
    with pytest.raises(DomainError):
        kmeans.assign(np.zeros((3, 2)), np.zeros((2, 3)))
    with pytest.raises(DomainError):
        kmeans.cost(np.zeros((3, 2)), np.zeros((2, 1)))


def test_lloyd_step_examples():
    c, _ = kmeans.lloyd_step(X3, [0.2, 3.0])
    assert c.ravel().tolist() == [0.5, 4.0]
    c, _ = kmeans.lloyd_step(X3, [0.5, 4.0])
    assert c.ravel().tolist() == [0.5, 4.0]
    c, a = kmeans.lloyd_step([0.0, 1.0], [0.5, 100.0])
    assert c.ravel().tolist() == [0.5, 100.0] and a.counts.tolist() == [2, 0]


def test_cost_examples():
    assert kmeans.cost(X3, [0.5, 4.0]) == 0.25
    assert kmeans.cost(X3, X3) == 0.0


@settings(max_examples=50)
@given(st.floats(0.1, 10))
def test_cost_scales_quadratically(s):
    rng = np.random.default_rng(0)
    X = rng.normal(size=(20, 2))
    C = rng.normal(size=(3, 2))
    assert kmeans.cost(s * X, s * C) == pytest.approx(s**2 * kmeans.cost(X, C), rel=1e-12)


def test_on_boundary_examples():
    assert kmeans.on_boundary([1.0], [0.0, 2.0], 1e-12)
    assert not kmeans.on_boundary(X3, [0.2, 3.0], 1e-9)
    tol = 1e-9
    assert not kmeans.on_boundary([1.0 + 2 * tol], [0.0, 2.0], tol)
    # general-d rule
    assert kmeans.on_boundary([[1.0, 5.0]], [[0.0, 0.0], [2.0, 0.0]], 1e-12)
    # coincident centers are not a boundary
    assert not kmeans.on_boundary([0.3], [1.0, 1.0], 1e-12)


def test_gradient_examples():
    assert kmeans.gradient(X3, [0.2, 3.0]).ravel() == pytest.approx([-0.6, -1.0], abs=1e-15)
    assert kmeans.gradient(X3, [0.5, 4.0]).ravel() == pytest.approx([0.0, 0.0], abs=1e-15)
    with pytest.raises(NondifferentiableError):
        kmeans.gradient([1.0], [0.0, 2.0])


def test_hessian_structure():
    H = kmeans.hessian(np.array([[0.0, 0], [1, 1], [5, 5]]), np.array([[0.0, 0], [5, 5]]))
    assert np.array_equal(H, np.diag([2.0, 2.0, 1.0, 1.0]))


def test_newton_examples():
    assert kmeans.newton_step(X3, [0.2, 3.0]).ravel() == pytest.approx([0.5, 4.0], abs=1e-12)
    assert kmeans.newton_step(X3, [0.5, 4.0]).ravel() == pytest.approx([0.5, 4.0], abs=1e-15)
    with pytest.raises(SingularHessianError):
        kmeans.newton_step([0.0, 1.0], [0.5, 100.0])


def test_newton_equals_lloyd_off_boundary():
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(100):
        X, C = random_instance(rng)
        lloyd, asg = kmeans.lloyd_step(X, C)
        if np.any(asg.counts == 0):
            continue
        worst = max(worst, np.abs(kmeans.newton_step(X, C) - lloyd).max())
    assert worst < 1e-10


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(5)
    h = 1e-6
    for _ in range(100):
        X, C = random_instance(rng)
        g = kmeans.gradient(X, C)
        fd = np.zeros_like(C)
        for idx in np.ndindex(C.shape):
            e = np.zeros_like(C)
            e[idx] = h
            fd[idx] = (kmeans.cost(X, C + e) - kmeans.cost(X, C - e)) / (2 * h)
        assert np.linalg.norm(fd - g) <= 1e-6 * max(np.linalg.norm(g), 1.0)


def test_run_examples():
    r = kmeans.run([0.0, 1, 4, 5], [0.0, 5.0])
    assert r.converged and r.centers.ravel().tolist() == [0.5, 4.5]
    r = kmeans.run(X3, [0.5, 4.0])
    assert r.converged and r.iterations == 1 and len(r.trajectory) == 2
    with pytest.raises(DomainError):
        kmeans.run(X3, [0.5, 4.0], max_iter=0)


def test_run_trajectory_properties():
    rng = np.random.default_rng(6)
    for _ in range(100):
        X, C = random_instance(rng, margin=0.0)
        r = kmeans.run(X, C)
        assert len(r.trajectory) == r.iterations + 1
        costs = [kmeans.cost(X, c) for c in r.trajectory]
        assert all(b <= a + 1e-12 for a, b in zip(costs, costs[1:]))
        # strict decrease except possibly for the confirming last step
        assert all(b < a for a, b in zip(costs[:-2], costs[1:-1]))
        labelings = [kmeans.assign(X, c).labels.tobytes() for c in r.trajectory[:-1]]
        assert len(set(labelings)) == len(labelings)
        assert r.cost == pytest.approx(costs[-1], rel=1e-14)


def test_trajectory_cost_profile():
    rng = np.random.default_rng(7)
    violations = 0
    for _ in range(100):
        X, C = random_instance(rng, margin=0.0)
        nxt, _ = kmeans.lloyd_step(X, C)
        prof = kmeans.trajectory_cost_profile(X, C, nxt, 17)
        assert prof[0] == (0.0, kmeans.cost(X, C))
        assert prof[-1][1] == pytest.approx(kmeans.cost(X, nxt), rel=1e-14)
        base = kmeans.cost(X, C)
        violations += sum(v > base + 1e-12 for _, v in prof)
    assert violations == 0


@settings(max_examples=100, deadline=None)
@given(
    arrays(np.float64, (12, 2), elements=st.floats(-10, 10)),
    arrays(np.float64, (3, 2), elements=st.floats(-10, 10)),
    arrays(np.float64, (3, 2), elements=st.floats(-1e-3, 1e-3)),
)
def test_cost_is_quadratic_within_a_cell(X, C, D):
    # Along a short segment that keeps every assignment, the cost is exactly quadratic.
    pts = [C + s * D for s in (0.0, 1.0, 2.0, 3.0)]
    labels = [kmeans.assign(X, p).labels for p in pts]
    if any(not np.array_equal(labels[0], lab) for lab in labels[1:]):
        return
    v = [kmeans.cost(X, p) for p in pts]
    pred = v[0] - 3 * v[1] + 3 * v[2]  # quadratic extrapolation to s = 3
    assert pred == pytest.approx(v[3], abs=1e-9 * max(1.0, v[3]))
