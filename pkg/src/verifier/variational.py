# -*- coding: utf-8 -*-
"""평형 측도의 특성화: ℓ, L, 변분 부등식, 위배 집합 E^±(w)."""
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from src.energy.functional import weighted_potential
from src.energy.measure import DiscreteMeasure, as_weights
from src.energy.problem import Problem
from src.utils import json_float

logger = logging.getLogger(__name__)

SUPPORT_RTOL = 1e-8
INEQ_RTOL = 1e-6

Violation = Tuple[int, float]


@dataclass(frozen=True, eq=False)
class SupportSets:
    """S_λ = {λ > eps}, S_{σ−λ} = {σ − λ > eps}"""

    s_lambda: np.ndarray
    s_residual: np.ndarray
    eps_supp: float


@dataclass(frozen=True)
class VariationalReport:
    ell: float
    L: float
    w: float
    eps_ineq: float
    eps_supp: float
    ineq1_violations: List[Violation] = field(default_factory=list)
    ineq2_violations: List[Violation] = field(default_factory=list)

    @property
    def w_interval(self) -> Tuple[float, float]:
        return self.ell, self.L

    @property
    def passed(self) -> bool:
        return not self.ineq1_violations and not self.ineq2_violations

    def worst(self, limit: int = 10) -> List[Tuple[str, int, float]]:
        """두 부등식을 합친 가장 나쁜 여유값 목록"""
        merged = [("ineq1", i, m) for i, m in self.ineq1_violations]
        merged += [("ineq2", i, m) for i, m in self.ineq2_violations]
        return sorted(merged, key=lambda item: item[2])[:limit]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "ell": json_float(self.ell),
            "L": json_float(self.L),
            "w": json_float(self.w),
            "w_interval": [json_float(self.ell), json_float(self.L)],
            "eps_ineq": self.eps_ineq,
            "eps_supp": self.eps_supp,
            "ineq1_violations": [[int(i), json_float(m)] for i, m in self.ineq1_violations],
            "ineq2_violations": [[int(i), json_float(m)] for i, m in self.ineq2_violations],
            "passed": self.passed,
        }


def sigma_scale(p: Problem) -> float:
    """max(σ) (0 이면 1)"""
    scale = float(p.sigma.weights.max()) if p.size else 0.0
    return scale if scale > 0 else 1.0


def potential_scale(W: np.ndarray) -> float:
    """max(1, max |W|) (유한한 값만)"""
    finite = W[np.isfinite(W)]
    return max(1.0, float(np.abs(finite).max())) if finite.size else 1.0


def default_eps_supp(p: Problem) -> float:
    return SUPPORT_RTOL * sigma_scale(p)


def default_eps_ineq(W: np.ndarray) -> float:
    return INEQ_RTOL * potential_scale(W)


def supports(p: Problem, lam: Union[DiscreteMeasure, np.ndarray], eps_supp: Optional[float] = None) -> SupportSets:
    eps = default_eps_supp(p) if eps_supp is None else float(eps_supp)
    w = as_weights(lam)
    return SupportSets(
        s_lambda=np.flatnonzero(w > eps),
        s_residual=np.flatnonzero(p.sigma.weights - w > eps),
        eps_supp=eps,
    )


def _ratio(p: Problem, lam) -> np.ndarray:
    return weighted_potential(p, as_weights(lam)) / p.g


def ell_L(p: Problem, lam: Union[DiscreteMeasure, np.ndarray], eps_supp: Optional[float] = None) -> Tuple[float, float]:
    """
    ℓ = max_{S_λ} W/g, L = min_{S_{σ−λ}} W/g.

    빈 집합에서는 ℓ = −∞, L = +∞ 입니다.
    """
    sets = supports(p, lam, eps_supp)
    ratio = _ratio(p, lam)
    if sets.s_lambda.size:
        ell = float(ratio[sets.s_lambda].max())
    else:
        logger.warning("S_λ 가 비어 있습니다: ℓ = -inf")
        ell = -math.inf
    if sets.s_residual.size:
        L = float(ratio[sets.s_residual].min())
    else:
        logger.warning("S_{σ-λ} 가 비어 있습니다 (λ = σ): L = +inf")
        L = math.inf
    return ell, L


def _midpoint(ell: float, L: float) -> float:
    if math.isfinite(ell) and math.isfinite(L):
        return 0.5 * (ell + L)
    if math.isfinite(ell):
        return ell
    if math.isfinite(L):
        return L
    return 0.0


def check_variational(p: Problem,
                      lam: Union[DiscreteMeasure, np.ndarray],
                      w: Optional[float] = None,
                      eps_ineq: Optional[float] = None,
                      eps_supp: Optional[float] = None) -> VariationalReport:
    """
    두 변분 부등식을 모든 문턱 지지점에서 검사합니다.

    ineq1: S_{σ−λ} 에서 W − w·g ≥ −eps_ineq
    ineq2: S_λ 에서 w·g − W ≥ −eps_ineq
    w 를 주지 않으면 (ℓ + L)/2 를 씁니다.
    """
    sets = supports(p, lam, eps_supp)
    W = weighted_potential(p, as_weights(lam))
    ell, L = ell_L(p, lam, sets.eps_supp)
    w = _midpoint(ell, L) if w is None else float(w)
    eps = default_eps_ineq(W) if eps_ineq is None else float(eps_ineq)

    def violations(indices: np.ndarray, margins: np.ndarray) -> List[Violation]:
        bad = margins < -eps
        pairs = [(int(i), float(m)) for i, m in zip(indices[bad], margins[bad])]
        return sorted(pairs, key=lambda item: item[1])

    ineq1 = violations(sets.s_residual, W[sets.s_residual] - w * p.g[sets.s_residual])
    ineq2 = violations(sets.s_lambda, w * p.g[sets.s_lambda] - W[sets.s_lambda])
    report = VariationalReport(ell, L, w, eps, sets.eps_supp, ineq1, ineq2)
    if report.passed:
        logger.info(f"변분 부등식 통과: ℓ={ell:.12g}, L={L:.12g}, w={w:.12g}")
    else:
        logger.warning(
            f"변분 부등식 위배: ineq1 {len(ineq1)}개, ineq2 {len(ineq2)}개 (ℓ={ell:.12g}, L={L:.12g}, w={w:.12g})"
        )
    return report


def violation_sets(p: Problem, lam: Union[DiscreteMeasure, np.ndarray], w: float) -> Tuple[np.ndarray, np.ndarray]:
    """E^+(w) = {W/g > w}, E^−(w) = {W/g < w} (전체 점 구름)"""
    ratio = _ratio(p, lam)
    return np.flatnonzero(ratio > w), np.flatnonzero(ratio < w)


def inherits_unconstrained(lam_star: Union[DiscreteMeasure, np.ndarray],
                           problem: Problem,
                           eps_supp: Optional[float] = None) -> bool:
    """
    상한 없는 최소점 λ* 가 제약 문제의 평형 측도이기도 한지.

    S_{λ*} 가 Σ₀ = {σ > 0, f < ∞} 안에 있고 σ ≥ λ* 이면 참입니다.
    """
    w = as_weights(lam_star)
    eps = default_eps_supp(problem) if eps_supp is None else float(eps_supp)
    support = w > eps
    allowed = (problem.sigma.weights > 0) & problem.finite_mask
    if np.any(support & ~allowed):
        return False
    slack = problem.sigma.weights - w
    return bool(np.all(slack[support] >= -eps))
