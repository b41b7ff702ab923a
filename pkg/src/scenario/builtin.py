# -*- coding: utf-8 -*-
"""
내장 예제.

example1: 두 동심 구면 위 Riesz 커널. 평형 측도는 바깥 구면 위 σ 와 같고 L > ℓ.
example2: 북극에 극점이 있는 방사형 외부장 아래 단위 구면의 Newton 평형 측도.
상한 없는 해 λ* 로 σ 를 만들면 제약 문제의 해가 다시 λ* 이고 L ≥ 2ℓ.
"""
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Tuple

import numpy as np

from src.energy.field import radial_field
from src.energy.functional import strong_distance, weighted_potential
from src.energy.measure import DiscreteMeasure
from src.energy.problem import Problem, build_problem
from src.errors import InputError, NonConvergenceError
from src.geometry.point_cloud import PointCloud, make_sphere, union
from src.kernels.matrix import assemble
from src.kernels.oracle import sphere_potential
from src.kernels.spec import KernelSpec
from src.solver.engine import solve, unconstrained_problem
from src.solver.options import Algorithm, SolverOptions, Solution, StepRule
from src.verifier.variational import VariationalReport, check_variational, ell_L, inherits_unconstrained, supports

logger = logging.getLogger(__name__)

EXAMPLES = ("example1", "example2")
PHASE1_PAIRWISE_STEPS = 8


@dataclass(frozen=True)
class ClaimCheck:
    """예제의 구조적 주장 하나"""

    name: str
    passed: bool
    detail: str


@dataclass(frozen=True, eq=False)
class ExampleResult:
    name: str
    cloud: PointCloud
    problem: Problem
    solution: Solution
    report: VariationalReport
    checks: List[ClaimCheck]
    extras: Dict[str, float] = field(default_factory=dict)
    phase1: Optional[Solution] = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks) and self.report.passed


def _require_converged(solution: Solution, phase: str) -> Solution:
    if not solution.converged:
        raise NonConvergenceError(f"{phase}: gap {solution.gap:.3e} did not reach the tolerance")
    return solution


def example1(opts: Optional[SolverOptions] = None,
             outer_count: int = 800,
             inner_count: int = 400,
             alpha: float = 2.5,
             inner_radius: float = 0.5,
             inner_mass: float = 0.5) -> ExampleResult:
    """
    바깥 단위 구면과 안쪽 구면(반지름 inner_radius) 위의 Riesz(α) 문제.

    σ 는 바깥 구면의 균등 확률측도와 안쪽 구면의 질량 inner_mass 균등측도의 합입니다.
    """
    opts = opts or SolverOptions()
    outer = make_sphere(3, 1.0, outer_count)
    inner = make_sphere(3, inner_radius, inner_count)
    cloud = union(outer, inner)
    outer_label, inner_label = outer.region[0], inner.region[0]
    matrix = assemble(KernelSpec.riesz(alpha, 3), cloud)
    sigma = DiscreteMeasure.uniform_per_region(cloud, {outer_label: 1.0, inner_label: inner_mass})
    problem = build_problem(matrix, sigma)
    solution = _require_converged(solve(problem, opts), "example1")
    report = check_variational(problem, solution.lam)

    lam = solution.weights
    outer_idx = cloud.indices_of(outer_label)
    inner_idx = cloud.indices_of(inner_label)
    deviation = float(np.abs(lam[outer_idx] - sigma.weights[outer_idx]).max())
    inner_max = float(lam[inner_idx].max())
    c1 = sphere_potential(alpha, 1.0)
    cr = sphere_potential(alpha, inner_radius)
    ell, L = solution.ell, solution.L
    relative = abs(ell - c1) / c1
    checks = [
        ClaimCheck("lambda_equals_outer_sigma", deviation <= 1e-4, f"max |λ-σ| on outer sphere = {deviation:.3e}"),
        ClaimCheck("inner_sphere_empty", inner_max <= 1e-6, f"max λ on inner sphere = {inner_max:.3e}"),
        ClaimCheck("L_exceeds_ell", L - ell > 0, f"L - ℓ = {L - ell:.6g}"),
        ClaimCheck("ell_matches_quadrature", relative <= 0.01, f"ℓ = {ell:.9g}, c₁ = {c1:.9g}, rel = {relative:.3e}"),
    ]
    _log_checks("example1", checks)
    extras = {"c1": c1, "c_r": cr, "max_outer_deviation": deviation, "max_inner_lambda": inner_max}
    return ExampleResult("example1", cloud, problem, solution, report, checks, extras)


def _phase_options(opts: SolverOptions) -> Tuple[SolverOptions, SolverOptions]:
    """두 단계 모두 쌍별 이동을 곁들인 조건부 경사법, 1단계는 더 엄격한 gap_tol"""
    phase1 = replace(opts, algorithm=Algorithm.CONDITIONAL_GRADIENT, step_rule=StepRule.EXACT_LINE_SEARCH,
                     pairwise_steps=max(opts.pairwise_steps, PHASE1_PAIRWISE_STEPS),
                     gap_tol=min(opts.gap_tol, 1e-12))
    phase2 = replace(opts, algorithm=Algorithm.CONDITIONAL_GRADIENT)
    return phase1, phase2


def example2(opts: Optional[SolverOptions] = None,
             count: int = 1000,
             pole: Tuple[float, float, float] = (0.0, 0.0, 1.0)) -> ExampleResult:
    """
    단위 구면 위 Newton 커널과 f(x) = |x − a|^{α−n} (a = 북극).

    1단계: 상한 없는 해 λ*, q = ℓ.
    2단계: σ = λ* (S_{λ*} 위) + 1/N (U = {W > 2q} 위) 로 제약 문제를 풉니다.
    """
    opts = opts or SolverOptions()
    phase1_opts, phase2_opts = _phase_options(opts)
    cloud = make_sphere(3, 1.0, count)
    spec = KernelSpec.newtonian(3)
    matrix = assemble(spec, cloud)
    field_spec = radial_field(cloud, pole, spec.alpha)

    free = unconstrained_problem(matrix, 1.0, field_spec)
    phase1 = _require_converged(solve(free, phase1_opts), "example2 phase 1")
    lam_star = phase1.weights
    eps_star = 1e-8 * float(lam_star.max())
    q, _ = ell_L(free, phase1.lam, eps_supp=eps_star)
    W_star = weighted_potential(free, lam_star)
    support = lam_star > 0.0
    neighborhood = (W_star > 2.0 * q) & ~support
    if not np.any(neighborhood):
        raise InputError("example2: the set {W > 2q} is empty; refine the cloud")
    logger.info(f"example2 1단계: q={q:.12g}, |S_λ*|={int(support.sum())}, |U|={int(neighborhood.sum())}")

    sigma = np.zeros(count)
    sigma[support] = lam_star[support]
    sigma[neighborhood] = 1.0 / count
    problem = build_problem(matrix, DiscreteMeasure(sigma), 1.0, field_spec)
    solution = _require_converged(solve(problem, phase2_opts), "example2 phase 2")
    report = check_variational(problem, solution.lam)

    distance = strong_distance(matrix, solution.lam, phase1.lam)
    ell, L = solution.ell, solution.L
    s_lambda = supports(problem, solution.lam).s_lambda
    ratio = weighted_potential(problem, solution.lam)[s_lambda] / problem.g[s_lambda]
    spread = float((ratio.max() - ratio.min()) / abs(ratio.mean())) if ratio.size else math.inf
    checks = [
        ClaimCheck("inherits_unconstrained", inherits_unconstrained(phase1.lam, problem),
                   "S_λ* ⊂ Σ₀ and σ ≥ λ* on S_λ*"),
        ClaimCheck("constrained_equals_unconstrained", distance <= 1e-4, f"‖λ - λ*‖ = {distance:.3e}"),
        ClaimCheck("L_at_least_twice_ell", L >= 2.0 * ell - report.eps_ineq, f"ℓ = {ell:.9g}, L = {L:.9g}"),
        ClaimCheck("W_constant_on_support", spread <= 0.01, f"relative spread of W/g on S_λ = {spread:.3e}"),
    ]
    _log_checks("example2", checks)
    extras = {"q": q, "distance_to_unconstrained": distance, "spread": spread,
              "support_size": float(support.sum()), "neighborhood_size": float(neighborhood.sum())}
    return ExampleResult("example2", cloud, problem, solution, report, checks, extras, phase1)


def run_example(name: str, opts: Optional[SolverOptions] = None) -> ExampleResult:
    if name == "example1":
        return example1(opts)
    if name == "example2":
        return example2(opts)
    raise InputError(f"unknown example: {name} (choose from {', '.join(EXAMPLES)})")


def _log_checks(name: str, checks: List[ClaimCheck]) -> None:
    for check in checks:
        if check.passed:
            logger.info(f"{name} 확인 통과 [{check.name}]: {check.detail}")
        else:
            logger.warning(f"{name} 확인 실패 [{check.name}]: {check.detail}")
