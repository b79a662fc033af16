import numpy as np
import pytest

from conjsub.problems import (
    PROBLEMS,
    SHOR_A,
    SHOR_B,
    SHOR_CHECKSUM,
    L1Objective,
    MaxQObjective,
    QuadraticObjective,
    ShorObjective,
    _data_checksum,
    get_problem,
    l1_problem,
    quadratic_problem,
    shor_problem,
)


def test_l1_example():
    v, g = L1Objective()(np.array([1.0, -2.0]))
    assert v == 3.0
    assert np.array_equal(g, [1.0, -1.0])


def test_maxq_example():
    v, g = MaxQObjective()(np.array([1.0, 2.0]))
    assert v == 4.0
    assert np.array_equal(g, [0.0, 4.0])


def test_quadratic_example():
    v, g = QuadraticObjective(np.array([1.0, 4.0]))(np.array([1.0, 1.0]))
    assert v == 2.5
    assert np.array_equal(g, [1.0, 4.0])


def central_difference(f, x, h=1e-6):
    out = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        out[i] = (f(x + e)[0] - f(x - e)[0]) / (2 * h)
    return out


@pytest.mark.parametrize("name", ["shor", "l1:4", "maxq:4", "quadratic:3"])
def test_gradient_matches_finite_differences_at_smooth_points(name):
    prob = get_problem(name)
    rng = np.random.default_rng(7)
    for _ in range(20):
        x = rng.normal(size=prob.dimension) * 2
        _, g = prob.objective(x)
        fd = central_difference(prob.objective, x)
        assert np.allclose(g, fd, atol=1e-6 * max(1.0, np.abs(g).max()))


@pytest.mark.parametrize("name", ["shor", "l1:3", "maxq:5", "quadratic:4"])
def test_subgradient_inequality_on_samples(name):
    prob = get_problem(name)
    rng = np.random.default_rng(11)
    xs = rng.normal(size=(50, prob.dimension)) * 3
    ys = rng.normal(size=(50, prob.dimension)) * 3
    for x in xs:
        fx, g = prob.objective(x)
        for y in ys:
            fy = prob.objective(y)[0]
            assert fy >= fx + g @ (y - x) - 1e-10 * max(1.0, abs(fy))


def test_subgradient_inequality_at_kinks():
    # sign(0) = 0 and ties broken towards the first index are still valid
    for prob, x in [(l1_problem(3), np.array([0.0, 1.0, 0.0])),
                    (get_problem("maxq:3"), np.array([1.0, -1.0, 0.5]))]:
        fx, g = prob.objective(x)
        for y in np.random.default_rng(3).normal(size=(200, 3)):
            assert prob.objective(y)[0] >= fx + g @ (y - x) - 1e-12


def test_shor_value_at_known_minimizer():
    prob = shor_problem()
    assert abs(prob.value(prob.x_star) - 22.60016) <= 1e-4
    # four pieces are active there
    pieces = ShorObjective().pieces(prob.x_star)
    assert np.sum(pieces >= pieces.max() - 1e-6) == 4


def test_shor_minimizer_is_locally_optimal():
    prob = shor_problem()
    f0 = prob.value(prob.x_star)
    rng = np.random.default_rng(0)
    for _ in range(2000):
        assert prob.value(prob.x_star + 1e-3 * rng.normal(size=5)) >= f0 - 1e-9


def test_shor_structure():
    x = np.array([0.3, -0.7, 1.2, 0.4, 2.0])
    expected = max(SHOR_B[i] * np.sum((x - SHOR_A[i]) ** 2) for i in range(10))
    v, g = ShorObjective()(x)
    assert v == pytest.approx(expected, rel=1e-14)
    i = int(np.argmax([SHOR_B[i] * np.sum((x - SHOR_A[i]) ** 2) for i in range(10)]))
    np.testing.assert_allclose(g, 2 * SHOR_B[i] * (x - SHOR_A[i]), rtol=1e-14)


def test_shor_data_checksum_pinned():
    assert _data_checksum(SHOR_A, SHOR_B) == SHOR_CHECKSUM
    assert SHOR_A.shape == (10, 5)


def test_shor_tie_break_uses_first_index():
    # two equal pieces meeting at x = (1, 0)
    obj = ShorObjective(np.array([[0.0, 0.0], [2.0, 0.0]]), np.array([1.0, 1.0]))
    v, g = obj(np.array([1.0, 0.0]))
    assert v == 1.0
    assert np.array_equal(g, [2.0, 0.0])
    assert np.array_equal(obj(np.array([1.0, 0.0]))[1], g)


def test_get_problem_parsing():
    assert get_problem("l1:4").dimension == 4
    assert get_problem("l1", 6).dimension == 6
    assert get_problem("shor").f_star == 22.60016
    with pytest.raises(KeyError):
        get_problem("rosenbrock")
    with pytest.raises(ValueError):
        get_problem("shor", 3)
    with pytest.raises(ValueError):
        get_problem("l1:3", 4)


def test_quadratic_curvatures():
    prob = quadratic_problem(3, kappa=0.5, L=2.0)
    np.testing.assert_allclose(prob.objective.curvatures, [0.5, 1.25, 2.0])
    with pytest.raises(ValueError):
        quadratic_problem(2, kappa=1.0, L=0.5)


@pytest.mark.parametrize("name", sorted(PROBLEMS))
def test_default_start_is_not_optimal(name):
    prob = PROBLEMS[name]()
    assert prob.value(prob.x0_default) > prob.f_star
