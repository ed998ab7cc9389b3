import numpy as np
import pytest

from ..core.experiments import example1_problem
from ..core.hermitian import psd_power
from ..core.mary_test import *
from ..exceptions import DimensionMismatch, ParameterError
from ..models.data_models import DensityOperator, MaryProblem, Povm

EPSILON_STAR = 7.0 / 15.0


def _random_state(rng, dim):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    return DensityOperator.from_matrix(rho / np.trace(rho).real)


def _random_povm(rng, dim, size):
    generators = []
    for _ in range(size):
        g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        generators.append(g @ g.conj().T)
    inv_sqrt = psd_power(sum(generators), -0.5)
    return Povm.from_matrices([inv_sqrt @ g @ inv_sqrt for g in generators])


class TestExampleProblem:
    """Test cases for the four-state qubit problem"""

    @pytest.fixture(scope="class")
    def problem(self):
        return example1_problem()

    @pytest.fixture(scope="class")
    def solved(self, problem):
        return solve_optimal_povm(problem)

    @pytest.fixture
    def exact_mu0(self):
        return DensityOperator.from_matrix(np.diag([0.75, 0.25]))

    def test_solver_reaches_minimum_error(self, problem, solved):
        povm, report, _ = solved
        assert report.passed
        assert error_probability(problem, povm) == pytest.approx(EPSILON_STAR, abs=1e-8)

    def test_optimal_measurement(self, solved):
        povm, _, _ = solved
        expected = [
            np.diag([8.0 / 9.0, 0.0]),
            np.array([[1.0 / 18.0, 1.0 / 6.0], [1.0 / 6.0, 0.5]]),
            np.array([[1.0 / 18.0, -1.0 / 6.0], [-1.0 / 6.0, 0.5]]),
            np.zeros((2, 2)),
        ]
        for element, target in zip(povm.elements, expected):
            np.testing.assert_allclose(element.matrix, target, atol=1e-6)

    def test_mu0_star(self, problem, solved, exact_mu0):
        povm, _, _ = solved
        star, c0 = mu0_star(problem, povm)
        assert c0 == pytest.approx(8.0 / 15.0, abs=1e-8)
        np.testing.assert_allclose(star.matrix, exact_mu0.matrix, atol=1e-8)

    def test_lower_bound_is_tight_at_mu0_star(self, problem, exact_mu0):
        assert theorem1_value(problem, exact_mu0) == pytest.approx(EPSILON_STAR, abs=1e-8)

    def test_average_state_bound(self, problem):
        avg = average_state(problem)
        np.testing.assert_allclose(avg.matrix, np.diag([0.7, 0.3]), atol=1e-12)
        value = theorem1_value(problem, avg)
        assert 0.4566 <= value <= 0.4576
        assert value < EPSILON_STAR

    def test_tight_spectrum(self, problem, exact_mu0):
        t, value = tight_spectrum_argmax(problem, exact_mu0)
        assert t == pytest.approx(8.0 / 15.0, abs=1e-9)
        assert value == pytest.approx(EPSILON_STAR, abs=1e-9)
        assert 0.4280 <= tight_spectrum_max(problem, average_state(problem)) <= 0.4290
        assert tight_spectrum_objective(problem, exact_mu0, 0.0) == pytest.approx(0.0, abs=1e-12)

    def test_hykl_rejects_perturbed_measurement(self, problem, solved):
        povm, _, _ = solved
        mixed = Povm.from_matrices([0.99 * e.matrix + 0.01 * np.eye(2) / 4 for e in povm.elements])
        assert not hykl_verify(problem, mixed).passed

    def test_trivial_measurement_error(self, problem):
        povm = Povm.from_matrices([np.eye(2), np.zeros((2, 2)), np.zeros((2, 2)), np.zeros((2, 2))])
        assert error_probability(problem, povm) == pytest.approx(0.6)
        assert lambda_operator(problem, povm).trace() == pytest.approx(0.4)

    def test_block_operators(self, problem, exact_mu0):
        assert t_operator(problem).dim == 8
        assert t_operator(problem).block_sizes == (2, 2, 2, 2)
        assert d_operator(problem, exact_mu0).trace() == pytest.approx(1.0)


@pytest.mark.parametrize("seed", range(100))
def test_lower_bound_never_exceeds_any_measurement(seed):
    rng = np.random.default_rng(seed)
    problem = MaryProblem.uniform([_random_state(rng, 3) for _ in range(3)])
    mu0 = _random_state(rng, 3)
    povm = _random_povm(rng, 3, 3)
    assert theorem1_value(problem, mu0) <= error_probability(problem, povm) + 1e-8


@pytest.mark.parametrize("seed", range(200))
def test_commuting_states_match_map_rule(seed):
    rng = np.random.default_rng(50 + seed)
    dim, size = 2 + seed % 3, 2 + (seed // 3) % 3
    diagonals = rng.uniform(0.05, 1.0, size=(size, dim))
    states = [DensityOperator.from_matrix(np.diag(d / d.sum())) for d in diagonals]
    priors = rng.uniform(0.2, 1.0, size=size)
    problem = MaryProblem(tuple(states), tuple(priors / priors.sum()))
    povm, report, _ = solve_optimal_povm(problem)
    assert report.passed
    expected = classical_map_error(problem)
    assert error_probability(problem, povm) == pytest.approx(expected, abs=1e-10)


@pytest.mark.parametrize("seed", range(50))
def test_lower_bound_is_tight_for_random_qubit_ensembles(seed):
    rng = np.random.default_rng(300 + seed)
    priors = rng.uniform(0.2, 1.0, size=3)
    problem = MaryProblem(tuple(_random_state(rng, 2) for _ in range(3)), tuple(priors / priors.sum()))
    povm, report, _ = solve_optimal_povm(problem)
    assert report.passed
    star, _ = mu0_star(problem, povm)
    assert theorem1_value(problem, star) == pytest.approx(error_probability(problem, povm), abs=1e-6)


@pytest.mark.parametrize("seed", range(50))
def test_tight_spectrum_never_exceeds_lower_bound(seed):
    rng = np.random.default_rng(700 + seed)
    dim = 2 + seed % 2
    problem = MaryProblem.uniform([_random_state(rng, dim) for _ in range(3)])
    mu0 = _random_state(rng, dim)
    assert tight_spectrum_max(problem, mu0) <= theorem1_value(problem, mu0) + 1e-8


def test_classical_map_error_needs_diagonal_states():
    assert classical_map_error(example1_problem()) is None


def test_invalid_arguments():
    problem = example1_problem()
    with pytest.raises(ParameterError):
        tight_spectrum_objective(problem, average_state(problem), -0.5)
    with pytest.raises(DimensionMismatch):
        theorem1_value(problem, DensityOperator.maximally_mixed(3))
    with pytest.raises(DimensionMismatch):
        error_probability(problem, Povm.from_matrices([np.eye(2) / 2, np.eye(2) / 2]))
    with pytest.raises(ParameterError):
        hykl_verify(problem, Povm.from_matrices([np.eye(2) / 4] * 4), tol=0.0)
