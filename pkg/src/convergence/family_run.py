# -*- coding: utf-8 -*-
"""
부분집합 족을 따라 평형 문제를 차례로 풀어 수렴을 확인합니다.

감소 족: 허용 집합이 줄어들수록 G 는 커지고, 연속한 두 단계 사이에
‖λ_d − λ_s‖² ≤ G_d − G_s 가 성립해야 합니다.
소진 족: 안쪽부터 커지는 K 위에서 β_K·σ_K 상한으로 풀고 마지막 단계가 전체 문제와 일치해야 합니다.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from src.energy.functional import strong_distance
from src.energy.measure import DiscreteMeasure
from src.energy.problem import Problem
from src.errors import InfeasibleProblemError, InputError, NonConvergenceError
from src.geometry.family import DECREASING, INCREASING, SubsetFamily
from src.solver.engine import solve
from src.solver.options import SolverOptions, Solution
from src.arrays import json_array
from src.utils import json_float

logger = logging.getLogger(__name__)

MONOTONE_SLACK = 1e-9
CONVEX_SLACK = 1e-8


@dataclass(frozen=True, eq=False)
class StageResult:
    """한 단계의 풀이 결과 (skipped 이면 value 는 nan)"""

    stage: int
    size: int
    value: float
    gap: float
    lam: Optional[DiscreteMeasure]
    converged: bool
    beta: Optional[float] = None
    skipped: bool = False


@dataclass(frozen=True, eq=False)
class FamilyRun:
    kind: str
    stages: List[StageResult]
    limit_value: float
    limit_lambda: DiscreteMeasure
    distances: List[float]
    monotone: bool
    convex_bound_ok: Optional[bool]
    final_within_tol: bool
    tol: float
    notes: List[str] = field(default_factory=list)

    @property
    def distances_monotone(self) -> bool:
        """극한 해까지의 거리가 (건너뛴 단계를 빼고) tol 안에서 증가하지 않는지"""
        solved = [d for d in self.distances if not math.isnan(d)]
        return all(d1 <= d0 + self.tol for d0, d1 in zip(solved, solved[1:]))

    @property
    def passed(self) -> bool:
        if not (self.distances_monotone and self.final_within_tol):
            return False
        if self.kind == DECREASING:
            return self.monotone and bool(self.convex_bound_ok)
        return True

    def solved(self) -> List[StageResult]:
        return [s for s in self.stages if not s.skipped]

    def to_frame(self) -> pd.DataFrame:
        """stage, G, gap, distance_to_final 표 (그래프용)"""
        return pd.DataFrame({
            "stage": [s.stage for s in self.stages],
            "size": [s.size for s in self.stages],
            "beta": [s.beta if s.beta is not None else math.nan for s in self.stages],
            "G": [s.value for s in self.stages],
            "gap": [s.gap for s in self.stages],
            "distance_to_final": self.distances,
            "skipped": [s.skipped for s in self.stages],
        })

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "stages": [
                {
                    "stage": s.stage,
                    "size": s.size,
                    "beta": json_float(s.beta) if s.beta is not None else None,
                    "value": json_float(s.value),
                    "gap": json_float(s.gap),
                    "converged": s.converged,
                    "skipped": s.skipped,
                    "lambda": json_array(s.lam.weights) if s.lam is not None else None,
                    "distance_to_final": json_float(d),
                }
                for s, d in zip(self.stages, self.distances)
            ],
            "limit_value": json_float(self.limit_value),
            "monotone": self.monotone,
            "distances_monotone": self.distances_monotone,
            "convex_bound_ok": self.convex_bound_ok,
            "final_within_tol": self.final_within_tol,
            "tol": self.tol,
            "passed": self.passed,
            "notes": list(self.notes),
        }


def _solve_stage(problem: Problem, opts: SolverOptions, previous: Optional[DiscreteMeasure], k: int) -> Solution:
    start = previous if previous is not None and problem.contains(previous) else None
    solution = solve(problem, opts, start=start)
    if not solution.converged:
        raise NonConvergenceError(f"stage {k} did not converge: gap {solution.gap:.3e} > {opts.gap_tol:.1e}")
    return solution


def _masked(weights: np.ndarray, indices: np.ndarray) -> DiscreteMeasure:
    out = np.zeros_like(weights)
    out[indices] = weights[indices]
    return DiscreteMeasure(out)


def run_decreasing_family(p_limit: Problem,
                          family: SubsetFamily,
                          sigma_schedule: Sequence[DiscreteMeasure],
                          opts: Optional[SolverOptions] = None,
                          tol: float = 1e-6) -> FamilyRun:
    """
    감소 족 Σ_s 와 감소하는 상한 σ_s 를 따라 풉니다.

    Args:
        p_limit: 극한 문제 (Σ, σ)
        family: 감소 족 (단계마다 σ_s 를 이 집합으로 제한)
        sigma_schedule: 단계별 상한, family 와 길이가 같음
        opts: 솔버 옵션
        tol: 마지막 단계 값과 거리의 허용 오차

    Returns:
        FamilyRun: 단계별 값, 극한 해까지의 거리, 판정 플래그
    """
    opts = opts or SolverOptions()
    if family.kind != DECREASING:
        raise InputError("run_decreasing_family needs a decreasing family")
    if len(sigma_schedule) != len(family):
        raise InputError(f"sigma schedule has {len(sigma_schedule)} entries, family has {len(family)} stages")
    notes: List[str] = []
    for k, (current, following) in enumerate(zip(sigma_schedule, sigma_schedule[1:])):
        if np.any(following.weights > current.weights + 1e-15 * np.maximum(1.0, current.weights)):
            notes.append(f"sigma schedule increases between stages {k} and {k + 1}")
            logger.warning(f"σ 일정이 단계 {k} -> {k + 1} 에서 증가합니다")

    limit = solve(p_limit, opts)
    if not limit.converged:
        raise NonConvergenceError(f"limit problem did not converge: gap {limit.gap:.3e}")
    logger.info(f"감소 족 실행: {len(family)}단계, 극한 G={limit.value:.12g}")

    stages: List[StageResult] = []
    previous: Optional[DiscreteMeasure] = None
    for k, (indices, sigma) in enumerate(zip(family.stages, sigma_schedule)):
        problem = p_limit.with_sigma(_masked(sigma.weights, indices))
        problem.require_feasible(strict=True)
        solution = _solve_stage(problem, opts, previous, k)
        stages.append(StageResult(k, int(indices.size), solution.value, solution.gap, solution.lam, True))
        previous = solution.lam
        logger.debug(f"단계 {k}: |Σ_s|={indices.size}, G={solution.value:.17g}")

    m = p_limit.matrix
    values = [s.value for s in stages]
    distances = [strong_distance(m, s.lam, limit.lam) for s in stages]
    monotone = all(b >= a - MONOTONE_SLACK for a, b in zip(values, values[1:]))
    convex_ok = True
    for a, b in zip(stages, stages[1:]):
        lhs = strong_distance(m, a.lam, b.lam) ** 2
        if lhs > b.value - a.value + CONVEX_SLACK:
            convex_ok = False
            notes.append(f"convex bound fails between stages {a.stage} and {b.stage}: {lhs:.3e} > {b.value - a.value:.3e}")
    if any(d1 > d0 + tol for d0, d1 in zip(distances, distances[1:])):
        notes.append("distances to the limit solution are not nonincreasing")
    final_ok = abs(values[-1] - limit.value) <= tol and distances[-1] <= tol

    run = FamilyRun(DECREASING, stages, limit.value, limit.lam, distances, monotone, convex_ok, final_ok, tol, notes)
    _log_run(run)
    return run


def default_beta_schedule(family: SubsetFamily) -> List[float]:
    """β_K = 1 + 0.2·(1 − |K|/N)"""
    n = family.base.size
    return [1.0 + 0.2 * (1.0 - size / n) for size in family.sizes()]


def run_compact_exhaustion(p: Problem,
                           family: SubsetFamily,
                           beta_schedule: Optional[Sequence[float]] = None,
                           opts: Optional[SolverOptions] = None,
                           tol: float = 1e-6,
                           distance_tol: float = 1e-5) -> FamilyRun:
    """
    증가하는 소진 족 K 위에서 상한 β_K·σ_K 로 풀어 전체 문제로 수렴하는지 확인합니다.

    허용 집합이 비는 앞쪽 단계는 건너뛰고 표시합니다.
    """
    opts = opts or SolverOptions()
    if family.kind != INCREASING:
        raise InputError("run_compact_exhaustion needs an increasing family")
    if family.stages[-1].size != p.size:
        raise InputError("the last exhaustion stage must be the whole index set")
    betas = list(default_beta_schedule(family) if beta_schedule is None else beta_schedule)
    if len(betas) != len(family):
        raise InputError(f"beta schedule has {len(betas)} entries, family has {len(family)} stages")
    if any(b < 1.0 for b in betas) or any(b1 > b0 for b0, b1 in zip(betas, betas[1:])):
        raise InputError(f"beta schedule must be >= 1 and nonincreasing, got {betas}")
    if abs(betas[-1] - 1.0) > 1e-6:
        raise InputError(f"the last beta must be 1 within 1e-6, got {betas[-1]}")

    full = solve(p, opts)
    if not full.converged:
        raise NonConvergenceError(f"full problem did not converge: gap {full.gap:.3e}")
    logger.info(f"소진 족 실행: {len(family)}단계, 전체 G={full.value:.12g}")

    notes: List[str] = []
    stages: List[StageResult] = []
    previous: Optional[DiscreteMeasure] = None
    last = len(family) - 1
    for k, (indices, beta) in enumerate(zip(family.stages, betas)):
        problem = p.with_sigma(_masked(beta * p.sigma.weights, indices))
        if not problem.is_strictly_feasible() and k < last:
            notes.append(f"stage {k} skipped: g-mass {problem.feasible_mass:.6g} is not above {p.normalization:g}")
            logger.warning(f"단계 {k} 건너뜀: 허용 집합이 비어 있거나 경계에 있습니다 (g·σ={problem.feasible_mass:.6g})")
            stages.append(StageResult(k, int(indices.size), math.nan, math.nan, None, False, beta, skipped=True))
            continue
        if not problem.is_feasible():
            raise InfeasibleProblemError(f"final exhaustion stage is infeasible (g-mass {problem.feasible_mass:.6g})")
        solution = _solve_stage(problem, opts, previous, k)
        stages.append(StageResult(k, int(indices.size), solution.value, solution.gap, solution.lam, True, beta))
        previous = solution.lam

    m = p.matrix
    distances = [math.nan if s.skipped else strong_distance(m, s.lam, full.lam) for s in stages]
    solved = [d for d in distances if not math.isnan(d)]
    monotone = all(d1 <= d0 + tol for d0, d1 in zip(solved, solved[1:]))
    final_ok = abs(stages[-1].value - full.value) <= tol and distances[-1] <= distance_tol

    run = FamilyRun(INCREASING, stages, full.value, full.lam, distances, monotone, None, final_ok, tol, notes)
    _log_run(run)
    return run


def _log_run(run: FamilyRun) -> None:
    if run.passed:
        logger.info(f"족 실행 통과 ({run.kind}): 마지막 거리 {run.distances[-1]:.3e}")
    else:
        logger.warning(f"족 실행 실패 ({run.kind}): {'; '.join(run.notes) or '허용 오차 초과'}")
