"""ℓ, L, 변분 부등식, 위배 집합과 평형 측도 특성화 시험"""
import math

import numpy as np
import pytest

from conftest import TIGHT, random_feasible
from src.energy.field import CaseI
from src.energy.functional import weighted_potential
from src.energy.measure import DiscreteMeasure
from src.energy.problem import build_problem
from src.kernels.matrix import KernelMatrix
from src.solver.engine import certificate_gap, solve, solve_unconstrained
from src.verifier.variational import (check_variational, default_eps_ineq, default_eps_supp, ell_L,
                                      inherits_unconstrained, supports, violation_sets)


class TestSupports:
    def test_interior_measure(self, symmetric_pair):
        sets = supports(symmetric_pair, DiscreteMeasure([0.5, 0.5]), 1e-8)
        np.testing.assert_array_equal(sets.s_lambda, [0, 1])
        np.testing.assert_array_equal(sets.s_residual, [0, 1])
        assert sets.eps_supp == 1e-8

    def test_vertex_measure(self, symmetric_pair):
        sets = supports(symmetric_pair, DiscreteMeasure([1.0, 0.0]))
        np.testing.assert_array_equal(sets.s_lambda, [0])
        np.testing.assert_array_equal(sets.s_residual, [1])

    def test_saturated_point_leaves_residual(self):
        p = build_problem(KernelMatrix.synthetic(np.eye(3)), DiscreteMeasure([0.5, 0.5, 1.0]))
        sets = supports(p, DiscreteMeasure([0.5, 0.25, 0.25]))
        assert 0 not in sets.s_residual
        np.testing.assert_array_equal(sets.s_lambda, [0, 1, 2])

    def test_default_threshold_scales_with_sigma(self):
        p = build_problem(KernelMatrix.synthetic(np.eye(2)), DiscreteMeasure([100.0, 50.0]))
        assert default_eps_supp(p) == pytest.approx(1e-6)
        assert default_eps_ineq(np.array([0.5, math.inf])) == pytest.approx(1e-6)
        assert default_eps_ineq(np.array([-300.0, 2.0])) == pytest.approx(3e-4)


class TestEllL:
    def test_cheap_point(self, cheap_point):
        ell, L = ell_L(cheap_point, DiscreteMeasure([1.0, 0.0]))
        assert ell == pytest.approx(1.0)
        assert L == pytest.approx(10.0)

    def test_symmetric_optimum(self, symmetric_pair):
        ell, L = ell_L(symmetric_pair, DiscreteMeasure([0.5, 0.5]))
        assert ell == pytest.approx(1.5)
        assert L == pytest.approx(1.5)

    def test_saturated_measure_has_infinite_L(self):
        p = build_problem(KernelMatrix.synthetic(np.eye(2)), DiscreteMeasure([0.5, 0.5]))
        ell, L = ell_L(p, DiscreteMeasure([0.5, 0.5]))
        assert ell == pytest.approx(0.5)
        assert L == math.inf

    def test_uses_g(self):
        p = build_problem(KernelMatrix.synthetic(np.eye(2)), DiscreteMeasure([1.0, 1.0]), g=[2.0, 1.0])
        # λ=(0.25, 0.5): W=(0.25, 0.5), W/g=(0.125, 0.5)
        ell, L = ell_L(p, DiscreteMeasure([0.25, 0.5]))
        assert ell == pytest.approx(0.5)
        assert L == pytest.approx(0.125)


class TestCheckVariational:
    def test_optimum_passes_at_midpoint(self, cheap_point):
        report = check_variational(cheap_point, DiscreteMeasure([1.0, 0.0]))
        assert report.passed
        assert report.w == pytest.approx(5.5)
        assert report.w_interval == (pytest.approx(1.0), pytest.approx(10.0))

    def test_w_above_L_breaks_first_inequality(self, cheap_point):
        report = check_variational(cheap_point, DiscreteMeasure([1.0, 0.0]), w=11.0)
        assert not report.passed
        assert [i for i, _ in report.ineq1_violations] == [1]
        assert report.ineq1_violations[0][1] == pytest.approx(-1.0)
        assert report.ineq2_violations == []

    def test_w_below_ell_breaks_second_inequality(self, cheap_point):
        report = check_variational(cheap_point, DiscreteMeasure([1.0, 0.0]), w=0.5)
        assert [i for i, _ in report.ineq2_violations] == [0]

    def test_non_optimal_measure_fails_everywhere(self, cheap_point):
        lam = DiscreteMeasure([0.2, 0.8])
        np.testing.assert_allclose(weighted_potential(cheap_point, lam), [0.2, 13.2])
        ell, L = ell_L(cheap_point, lam)
        assert ell == pytest.approx(13.2)
        assert L == pytest.approx(0.2)
        for w in np.linspace(0.0, 15.0, 31):
            assert not check_variational(cheap_point, lam, w=float(w)).passed

    def test_violations_are_sorted_by_margin(self):
        p = build_problem(KernelMatrix.synthetic(np.diag([1.0, 2.0, 3.0])), DiscreteMeasure([1.0, 1.0, 1.0]))
        lam = DiscreteMeasure([0.2, 0.3, 0.5])
        # W = (0.2, 0.6, 1.5), w = 0 → ineq2 margins (-0.2, -0.6, -1.5)
        report = check_variational(p, lam, w=0.0)
        assert [i for i, _ in report.ineq2_violations] == [2, 1, 0]
        assert [name for name, _, _ in report.worst(2)] == ["ineq2", "ineq2"]

    def test_report_dict(self, cheap_point):
        data = check_variational(cheap_point, DiscreteMeasure([1.0, 0.0])).to_dict()
        assert data["passed"] is True
        assert data["w_interval"] == [pytest.approx(1.0), pytest.approx(10.0)]
        assert data["eps_supp"] > 0 and data["eps_ineq"] > 0


class TestViolationSets:
    def test_extremes(self, cheap_point):
        lam = DiscreteMeasure([1.0, 0.0])
        plus, minus = violation_sets(cheap_point, lam, 0.0)
        np.testing.assert_array_equal(plus, [0, 1])
        assert minus.size == 0
        plus, minus = violation_sets(cheap_point, lam, 100.0)
        assert plus.size == 0
        np.testing.assert_array_equal(minus, [0, 1])

    def test_disjoint(self, make_random_problem):
        rng = np.random.default_rng(3)
        p = make_random_problem(7)
        lam = random_feasible(p, rng)
        for w in rng.uniform(-2.0, 5.0, size=20):
            plus, minus = violation_sets(p, lam, float(w))
            assert np.intersect1d(plus, minus).size == 0

    def test_ratio_equal_to_w_is_in_neither(self, cheap_point):
        plus, minus = violation_sets(cheap_point, DiscreteMeasure([1.0, 0.0]), 1.0)
        np.testing.assert_array_equal(plus, [1])
        assert minus.size == 0


class TestInheritsUnconstrained:
    def test_large_sigma_inherits(self):
        m = KernelMatrix.synthetic([[2.0, 1.0], [1.0, 2.0]])
        free = solve_unconstrained(m, opts=TIGHT)
        p = build_problem(m, DiscreteMeasure([0.6, 0.6]))
        assert inherits_unconstrained(free.lam, p)
        np.testing.assert_allclose(solve(p, TIGHT).weights, free.weights, atol=1e-6)

    def test_tight_sigma_does_not(self):
        m = KernelMatrix.synthetic([[2.0, 1.0], [1.0, 2.0]])
        free = solve_unconstrained(m, opts=TIGHT)
        assert not inherits_unconstrained(free.lam, build_problem(m, DiscreteMeasure([0.4, 1.0])))

    def test_infinite_field_excludes_support(self):
        m = KernelMatrix.synthetic([[2.0, 1.0], [1.0, 2.0]])
        free = solve_unconstrained(m, opts=TIGHT)
        p = build_problem(m, DiscreteMeasure([1.0, 1.0]), field=CaseI([math.inf, 0.0]))
        assert not inherits_unconstrained(free.lam, p)


class TestEquilibriumCharacterisation:
    """풀린 무작위 문제에서 ℓ ≤ L 이고 [ℓ, L] 안의 w 가 모두 검사를 통과하는지"""

    @pytest.mark.parametrize("seed", range(50))
    def test_random_instance(self, seed, make_random_problem):
        p = make_random_problem(7000 + seed, case_two=seed % 4 == 0)
        assert p.is_strictly_feasible()
        solution = solve(p, TIGHT)
        assert solution.converged

        ell, L = ell_L(p, solution.lam)
        assert math.isfinite(ell) and math.isfinite(L)
        assert ell <= L + 1e-8

        for w in (ell, 0.5 * (ell + L), L):
            report = check_variational(p, solution.lam, w=w)
            assert report.passed, report.worst()
            eps = report.eps_ineq
        assert certificate_gap(p, solution.lam) <= p.size * eps * float(p.g.max())

    @pytest.mark.parametrize("seed", range(20))
    def test_passing_measure_has_small_gap(self, seed, make_random_problem):
        """검사를 통과하는 허용 측도라면 gap ≤ N·eps_ineq·max(g)"""
        p = make_random_problem(8000 + seed)
        rng = np.random.default_rng(seed)
        candidates = [solve(p, TIGHT).lam] + [random_feasible(p, rng) for _ in range(5)]
        for lam in candidates:
            ell, L = ell_L(p, lam)
            report = check_variational(p, lam, w=0.5 * (ell + L) if ell <= L else None)
            if report.passed:
                assert certificate_gap(p, lam) <= p.size * report.eps_ineq * float(p.g.max()) + 1e-12
