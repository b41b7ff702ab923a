# -*- coding: utf-8 -*-
"""
제약 있는 f-가중 최소 에너지 문제의 반복 솔버.

조건부 경사법은 선형 최소화 오라클 s = lp_oracle(W^f_ν) 을 쓰고, 그 값으로 계산한
certificate gap ⟨W, ν⟩ − ⟨W, s⟩ 를 정지 조건으로 사용합니다. 각 반복은 한 번의
Frank–Wolfe 단계와 가장 위배되는 쌍 (S_ν 의 argmax W/g, S_{σ−ν} 의 argmin W/g) 사이의
질량 이동 단계로 이루어집니다.
"""
import logging
import math
import time
from typing import Optional, Sequence, Union

import numpy as np

from src.energy.field import FieldSpec
from src.energy.functional import finite_dot, lower_bound, weighted_energy, weighted_potential
from src.energy.measure import DiscreteMeasure, as_weights
from src.energy.problem import Problem, build_problem
from src.errors import DescentViolationError, InfeasibleProblemError, MeasureError, NotPositiveDefiniteError, SolverError
from src.kernels.matrix import KernelMatrix
from src.solver.options import Algorithm, SolverOptions, Solution, StepRule
from src.solver.oracle import feasible_point, lp_oracle, project_box_hyperplane
from src.verifier.variational import ell_L

logger = logging.getLogger(__name__)

DEFAULT_CAP_FACTOR = 1e6
FEASIBLE_ATOL = 1e-10
VALUE_RTOL = 1e-12
PG_FALLBACK_RATIO = 1e-3


def certificate_gap(p: Problem, lam: Union[DiscreteMeasure, np.ndarray]) -> float:
    """
    ⟨W^f_λ, λ⟩ − min_ν ⟨W^f_λ, ν⟩ (허용 집합 위의 최소).

    평형 측도에서 정확히 0 이고 G_f(λ) − G_f^σ 의 상계입니다.
    """
    w = as_weights(lam)
    if not p.contains(DiscreteMeasure(w), atol=1e-8):
        raise InfeasibleProblemError("certificate gap requires a feasible measure")
    potential = weighted_potential(p, w)
    current = finite_dot(potential, w)
    if math.isinf(current):
        raise InfeasibleProblemError("measure charges points where the field is infinite")
    best = finite_dot(potential, lp_oracle(potential, p).weights)
    return max(current - best, 0.0)


class _State:
    """반복 중인 ν 와 점진적으로 갱신하는 경사 Mν + f"""

    def __init__(self, p: Problem, x: np.ndarray, refresh_every: int) -> None:
        self.p = p
        self.m = p.matrix.entries
        self.g = p.g
        self.sigma = p.effective_sigma
        self.finite = p.finite_mask
        self.f = np.where(self.finite, p.f, 0.0)
        self.refresh_every = refresh_every
        self.x = x.copy()
        self.updates = 0
        self.refresh()

    def refresh(self) -> None:
        np.clip(self.x, 0.0, self.sigma, out=self.x)
        self.grad = self.m @ self.x + self.f
        self.value = float(self.x @ (self.grad + self.f))
        self.updates = 0

    def tick(self) -> None:
        self.updates += 1
        if self.updates >= self.refresh_every:
            self.refresh()

    def oracle_vertex(self) -> np.ndarray:
        costs = np.where(self.finite, self.grad, np.inf)
        return lp_oracle(costs, self.p).weights

    def gap(self, s: np.ndarray) -> float:
        return max(float(self.grad @ (self.x - s)), 0.0)

    def move(self, d: np.ndarray, h: float, md: np.ndarray, slope: float, curv: float) -> None:
        self.x += h * d
        self.grad += h * md
        self.value += 2.0 * h * slope + h * h * curv
        self.tick()

    def pairwise(self, steps: int) -> None:
        """가장 위배되는 쌍 사이의 질량 이동 (⟨g, ν⟩ 보존)"""
        x, g, sigma, m = self.x, self.g, self.sigma, self.m
        for _ in range(steps):
            ratio = self.grad / g
            support = np.flatnonzero(x > 0.0)
            residual = np.flatnonzero(x < sigma)
            if support.size == 0 or residual.size == 0:
                return
            i = int(support[np.argmax(ratio[support])])
            j = int(residual[np.argmin(ratio[residual])])
            slope = ratio[j] - ratio[i]
            if i == j or slope >= 0.0:
                return
            curv = m[j, j] / g[j] ** 2 - 2.0 * m[i, j] / (g[i] * g[j]) + m[i, i] / g[i] ** 2
            room_i = x[i] * g[i]
            room_j = (sigma[j] - x[j]) * g[j]
            t_max = min(room_i, room_j)
            t = min(-slope / curv, t_max) if curv > 0.0 else t_max
            if t <= 0.0:
                return
            if t >= t_max:
                # 묶이는 좌표는 경계값을 정확히 대입
                x[i] = 0.0 if room_i <= room_j else x[i] - t / g[i]
                x[j] = sigma[j] if room_j <= room_i else x[j] + t / g[j]
            else:
                x[i] -= t / g[i]
                x[j] += t / g[j]
            self.grad += t * (m[:, j] / g[j] - m[:, i] / g[i])
            self.value += 2.0 * t * slope + t * t * curv
            self.tick()


def _improves(value: float, gap: float, best_value: float, best_gap: float) -> bool:
    """값이 상대 허용오차 안에서 같으면 gap 이 작은 쪽을 고름"""
    if not math.isfinite(best_value):
        return True
    tol = VALUE_RTOL * max(1.0, abs(best_value))
    if value < best_value - tol:
        return True
    return value <= best_value + tol and gap < best_gap


def _line_step(slope: float, curv: float, k: int, rule: StepRule, algorithm: Algorithm) -> float:
    """[0, 1] 안의 보폭"""
    if rule is StepRule.FIXED_DECAY:
        return 2.0 / (k + 2.0) if algorithm is Algorithm.CONDITIONAL_GRADIENT else 1.0
    if curv <= 0.0:
        return 1.0 if slope < 0.0 else 0.0
    return min(max(-slope / curv, 0.0), 1.0)


def solve(p: Problem,
          opts: Optional[SolverOptions] = None,
          start: Optional[Union[DiscreteMeasure, np.ndarray]] = None) -> Solution:
    """
    평형 측도 λ^σ_Σ 를 계산합니다.

    Args:
        p: 허용 가능한 문제
        opts: 솔버 옵션 (기본값 SolverOptions())
        start: 허용 가능한 시작점 (기본값 feasible_point)

    Returns:
        Solution: max_iters 에 도달하면 converged=False 와 가장 좋은 반복값
    """
    opts = opts or SolverOptions()
    p.require_feasible()
    check = p.matrix.pd_check
    if not check.ok:
        raise NotPositiveDefiniteError(
            f"kernel matrix is not positive definite (min pivot {check.min_pivot:.3e})",
            min_pivot=check.min_pivot,
        )
    if start is None:
        x0 = feasible_point(p).weights
    else:
        x0 = as_weights(start)
        if not p.contains(DiscreteMeasure(x0), atol=FEASIBLE_ATOL):
            raise MeasureError("start measure is not feasible for this problem")

    state = _State(p, x0, opts.refresh_every)
    cg = opts.algorithm is Algorithm.CONDITIONAL_GRADIENT
    step_size = 1.0 / p.matrix.max_eigenvalue if not cg else 0.0
    started = time.perf_counter()
    logger.info(f"솔버 시작: {opts.algorithm.value}, N={p.size}, gap_tol={opts.gap_tol:.1e}, max_iters={opts.max_iters}")

    best_x, best_value, best_gap = state.x.copy(), math.inf, math.inf
    converged = False
    iterations = 0
    for k in range(opts.max_iters + 1):
        iterations = k
        s = state.oracle_vertex()
        gap = state.gap(s)
        if gap <= opts.gap_tol and state.updates:
            # 점진 갱신 오차를 지우고 다시 판정
            state.refresh()
            s = state.oracle_vertex()
            gap = state.gap(s)
        if k % opts.log_every == 0:
            logger.debug(f"반복 {k}: G={state.value:.17g}, gap={gap:.3e}")
        if gap <= opts.gap_tol:
            # 정지 판정을 통과한 반복값을 그대로 결과로 씀
            best_x, best_value, best_gap = state.x.copy(), state.value, gap
            converged = True
            break
        if _improves(state.value, gap, best_value, best_gap):
            best_x, best_value, best_gap = state.x.copy(), state.value, gap
        if k == opts.max_iters:
            break

        previous = state.value
        if cg:
            d = s - state.x
        else:
            y = project_box_hyperplane(state.x - step_size * state.grad, p).weights
            d = y - state.x
        md = state.m @ d
        slope = float(state.grad @ d)
        curv = float(d @ md)
        h = _line_step(slope, curv, k, opts.step_rule, opts.algorithm)
        fallback = False
        stalled = h == 0.0 or -slope < PG_FALLBACK_RATIO * gap
        if not cg and opts.step_rule is StepRule.EXACT_LINE_SEARCH and stalled:
            # 투영 방향이 멈추거나 거의 내려가지 않으면 오라클 꼭짓점 방향과 쌍별 이동으로 이어감
            d = s - state.x
            md = state.m @ d
            slope = float(state.grad @ d)
            curv = float(d @ md)
            h = _line_step(slope, curv, k, StepRule.EXACT_LINE_SEARCH, Algorithm.CONDITIONAL_GRADIENT)
            fallback = True
        uses_pairwise = (cg and opts.step_rule is StepRule.EXACT_LINE_SEARCH) or fallback
        if h == 0.0 and (not uses_pairwise or opts.pairwise_steps == 0):
            logger.warning(f"반복 {k}: 더 이상 내려갈 방향이 없습니다 (gap={gap:.3e})")
            break
        state.move(d, h, md, slope, curv)
        if uses_pairwise and opts.pairwise_steps:
            state.pairwise(opts.pairwise_steps)
        if opts.debug and opts.step_rule is StepRule.EXACT_LINE_SEARCH:
            if state.value > previous + 1e-12 * max(1.0, abs(previous)):
                raise DescentViolationError(
                    f"objective increased at iteration {k}: {previous:.17g} -> {state.value:.17g}"
                )

    lam = DiscreteMeasure(np.clip(best_x, 0.0, state.sigma))
    value = weighted_energy(p, lam)
    gap = certificate_gap(p, lam)
    converged = converged and gap <= opts.gap_tol
    ell, L = ell_L(p, lam)
    elapsed = time.perf_counter() - started

    bound = lower_bound(p)
    if value < bound - 1e-9 * max(1.0, abs(bound)):
        logger.error(f"목적함수 값 {value:.17g} 이 하한 {bound:.17g} 보다 작습니다")
        raise SolverError(f"objective {value:.17g} fell below the lower bound {bound:.17g}")

    if converged:
        logger.info(f"솔버 완료: {iterations}회 반복, G={value:.12g}, gap={gap:.3e}, {elapsed:.2f}초")
    else:
        logger.warning(f"솔버 미수렴: {iterations}회 반복 후 gap={gap:.3e} > {opts.gap_tol:.1e}")
    return Solution(lam, value, gap, iterations, ell, L, converged, opts, p.fingerprint())


def unconstrained_problem(matrix: KernelMatrix,
                          g: Union[float, Sequence[float], np.ndarray] = 1.0,
                          field: Optional[FieldSpec] = None,
                          support: Optional[Sequence[int]] = None,
                          normalization: float = 1.0,
                          cap_factor: float = DEFAULT_CAP_FACTOR) -> Problem:
    """
    상한 없는 문제의 대리 문제.

    support 위에 σ = cap_factor · c / Σ_support g 를 두어 상한이 활성화되지 않게 합니다.
    """
    n = matrix.size
    idx = np.arange(n) if support is None else np.unique(np.asarray(support, dtype=int))
    if idx.size == 0:
        raise MeasureError("unconstrained problem needs a nonempty support")
    g_vec = np.full(n, float(g)) if np.isscalar(g) else np.asarray(g, dtype=float)
    cap = cap_factor * normalization / float(g_vec[idx].sum())
    sigma = np.zeros(n)
    sigma[idx] = cap
    return build_problem(matrix, DiscreteMeasure(sigma), g_vec, field, normalization)


def solve_unconstrained(matrix: KernelMatrix,
                        g: Union[float, Sequence[float], np.ndarray] = 1.0,
                        field: Optional[FieldSpec] = None,
                        support: Optional[Sequence[int]] = None,
                        opts: Optional[SolverOptions] = None,
                        normalization: float = 1.0,
                        cap_factor: float = DEFAULT_CAP_FACTOR) -> Solution:
    """상한 없는 f-가중 평형 측도 (support 위)"""
    problem = unconstrained_problem(matrix, g, field, support, normalization, cap_factor)
    solution = solve(problem, opts)
    if np.any(solution.weights >= 0.5 * problem.sigma.weights.max()):
        logger.warning("대리 상한에 가까운 질량이 있습니다. cap_factor 를 늘리세요")
    return solution
