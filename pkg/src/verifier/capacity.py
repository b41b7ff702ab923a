# -*- coding: utf-8 -*-
"""부분집합의 용량 분포 θ_B 와 용량 C(B)."""
import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from src.energy.functional import energy, potential
from src.energy.measure import DiscreteMeasure
from src.errors import MeasureError
from src.kernels.matrix import KernelMatrix
from src.solver.engine import solve_unconstrained
from src.solver.options import SolverOptions

logger = logging.getLogger(__name__)

CAPACITY_OPTIONS = SolverOptions(gap_tol=1e-13)
IDENTITY_RTOL = 1e-8
POTENTIAL_ATOL = 1e-6


@dataclass(frozen=True)
class CapacityCheck:
    """θ(X) = ‖θ‖² = C 와 B 위의 κ_θ ≥ 1 확인 결과"""

    capacity: float
    theta_norm2: float
    min_potential: float

    @property
    def identity_error(self) -> float:
        """|θ(X) − ‖θ‖²| / C"""
        return abs(self.capacity - self.theta_norm2) / self.capacity

    @property
    def ok(self) -> bool:
        return self.identity_error <= IDENTITY_RTOL and self.min_potential >= 1.0 - POTENTIAL_ATOL

    def to_dict(self) -> Dict[str, Any]:
        return {
            "theta_norm2": self.theta_norm2,
            "identity_error": self.identity_error,
            "min_potential": self.min_potential,
            "identities_ok": self.ok,
        }


def check_capacity(m: KernelMatrix, theta: DiscreteMeasure, subset: Sequence[int]) -> CapacityCheck:
    idx = np.unique(np.asarray(subset, dtype=int))
    return CapacityCheck(
        capacity=float(theta.weights[idx].sum()),
        theta_norm2=energy(m, theta),
        min_potential=float(potential(m, theta)[idx].min()),
    )


def capacitary_distribution(m: KernelMatrix,
                            subset: Sequence[int],
                            opts: Optional[SolverOptions] = None) -> Tuple[DiscreteMeasure, float]:
    """
    θ_B 와 C(B) 를 계산합니다.

    B 위의 확률측도 중 에너지가 가장 작은 ν 를 구한 뒤 θ = ν / ‖ν‖², C = θ(X) = 1/‖ν‖².

    Args:
        m: 커널 행렬
        subset: 인덱스 집합 B (비어 있으면 안 됨)
        opts: 솔버 옵션 (기본값은 gap_tol=1e-13)

    Returns:
        Tuple[DiscreteMeasure, float]: 전체 크기의 θ 와 C
    """
    idx = np.unique(np.asarray(subset, dtype=int))
    if idx.size == 0:
        raise MeasureError("capacitary distribution of an empty subset is undefined")
    if idx[0] < 0 or idx[-1] >= m.size:
        raise MeasureError(f"subset index out of range for matrix of size {m.size}")

    sub = m.restrict(idx)
    solution = solve_unconstrained(sub, g=1.0, opts=opts or CAPACITY_OPTIONS)
    nu = solution.weights
    norm2 = energy(sub, nu)
    theta_sub = nu / norm2
    theta = np.zeros(m.size)
    theta[idx] = theta_sub
    theta_measure = DiscreteMeasure(theta)
    cap = float(theta_sub.sum())

    check = check_capacity(m, theta_measure, idx)
    if check.identity_error > IDENTITY_RTOL:
        logger.warning(f"용량 항등식 오차: θ(X)={cap:.17g}, ‖θ‖²={check.theta_norm2:.17g}")
    if check.min_potential < 1.0 - POTENTIAL_ATOL:
        logger.warning(f"용량 분포의 퍼텐셜 최솟값 {check.min_potential:.12g} < 1")
    logger.info(f"용량 계산: |B|={idx.size}, C={cap:.12g}, min κ_θ={check.min_potential:.12g}")
    return theta_measure, cap


def capacity(m: KernelMatrix, subset: Sequence[int], opts: Optional[SolverOptions] = None) -> float:
    """C(B) (빈 집합은 0)"""
    if len(subset) == 0:
        return 0.0
    return capacitary_distribution(m, subset, opts)[1]
