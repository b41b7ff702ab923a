"""내장 예제 (동심 구면 Riesz, 북극 외부장 Newton) 의 구조적 주장 시험"""
import math

import numpy as np
import pytest

from src.errors import InputError
from src.kernels.oracle import sphere_potential
from src.scenario.builtin import _phase_options, example1, example2, run_example
from src.solver.options import Algorithm, SolverOptions, StepRule


@pytest.fixture(scope="module")
def concentric():
    return example1()


@pytest.fixture(scope="module")
def north_pole():
    return example2()


def _check(result, name):
    return next(c for c in result.checks if c.name == name)


def test_unknown_example():
    with pytest.raises(InputError):
        run_example("example3")


def test_phases_use_conditional_gradient():
    phase1, phase2 = _phase_options(SolverOptions(gap_tol=1e-9, pairwise_steps=0, algorithm="pg"))
    assert phase1.algorithm is Algorithm.CONDITIONAL_GRADIENT
    assert phase1.step_rule is StepRule.EXACT_LINE_SEARCH
    assert phase1.pairwise_steps > 0
    assert phase1.gap_tol <= 1e-12
    assert phase2.algorithm is Algorithm.CONDITIONAL_GRADIENT


@pytest.mark.slow
class TestConcentricSpheres:
    def test_passes(self, concentric):
        assert concentric.solution.converged
        assert concentric.report.passed, concentric.report.worst()
        assert concentric.passed, [c.detail for c in concentric.checks if not c.passed]

    def test_outer_sphere_is_saturated(self, concentric):
        assert _check(concentric, "lambda_equals_outer_sigma").passed
        assert concentric.extras["max_outer_deviation"] <= 1e-4

    def test_inner_sphere_is_empty(self, concentric):
        assert concentric.extras["max_inner_lambda"] <= 1e-6

    def test_interval_is_nondegenerate(self, concentric):
        solution = concentric.solution
        assert solution.L > solution.ell
        c1 = concentric.extras["c1"]
        assert c1 == pytest.approx(sphere_potential(2.5, 1.0))
        assert abs(solution.ell - c1) / c1 <= 0.01
        assert concentric.extras["c_r"] > c1

    def test_total_mass(self, concentric):
        assert concentric.solution.lam.total_mass == pytest.approx(1.0, abs=1e-9)


@pytest.mark.slow
class TestNorthPoleField:
    def test_passes(self, north_pole):
        assert north_pole.phase1 is not None and north_pole.phase1.converged
        assert north_pole.solution.converged
        assert north_pole.passed, [c.detail for c in north_pole.checks if not c.passed]

    def test_constrained_solution_equals_unconstrained(self, north_pole):
        assert north_pole.extras["distance_to_unconstrained"] <= 1e-4
        np.testing.assert_allclose(north_pole.solution.weights, north_pole.phase1.weights, atol=1e-5)

    def test_unconstrained_solution_is_inherited(self, north_pole):
        check = _check(north_pole, "inherits_unconstrained")
        assert check.passed, check.detail

    def test_wide_interval(self, north_pole):
        solution = north_pole.solution
        assert solution.L >= 2.0 * solution.ell - north_pole.report.eps_ineq
        assert math.isfinite(solution.ell)

    def test_neighborhood_is_not_empty(self, north_pole):
        assert north_pole.extras["neighborhood_size"] > 0
        assert north_pole.extras["spread"] <= 0.01
