# -*- coding: utf-8 -*-
"""제약 있는 f-가중 최소 에너지 문제의 데이터."""
import logging
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Union

import numpy as np

from src.energy.field import FieldSpec, resolve_field, zero_field
from src.energy.measure import DiscreteMeasure
from src.errors import InfeasibleProblemError, MeasureError
from src.kernels.matrix import KernelMatrix
from src.arrays import array_digest

logger = logging.getLogger(__name__)

FEASIBILITY_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class Problem:
    """
    min G_f(ν) = ν^T M ν + 2⟨f, ν⟩  s.t.  0 ≤ ν ≤ σ, ⟨g, ν⟩ = normalization.

    f 는 풀린 외부장 벡터이고 field 는 그 원래 정의입니다.
    """

    matrix: KernelMatrix
    g: np.ndarray
    f: np.ndarray
    field: FieldSpec
    sigma: DiscreteMeasure
    normalization: float = 1.0

    def __post_init__(self) -> None:
        n = self.matrix.size
        g = np.array(self.g, dtype=float).ravel()
        f = np.array(self.f, dtype=float).ravel()
        if g.size != n or f.size != n or self.sigma.size != n:
            raise MeasureError(
                f"size mismatch: matrix {n}, g {g.size}, f {f.size}, sigma {self.sigma.size}"
            )
        if not np.all(np.isfinite(g)) or np.any(g <= 0):
            raise MeasureError("g must be finite and strictly positive")
        if np.any(np.isnan(f)) or np.any(f == -np.inf):
            raise MeasureError("field vector must not contain NaN or -inf")
        if not self.normalization > 0:
            raise MeasureError(f"normalization must be positive, got {self.normalization}")
        g.setflags(write=False)
        f.setflags(write=False)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "normalization", float(self.normalization))

    @property
    def size(self) -> int:
        return self.matrix.size

    @property
    def finite_mask(self) -> np.ndarray:
        """Σ₀ = {f < ∞}"""
        return np.isfinite(self.f)

    @property
    def effective_sigma(self) -> np.ndarray:
        """f = ∞ 인 점의 상한을 0 으로 둔 σ"""
        return np.where(self.finite_mask, self.sigma.weights, 0.0)

    @property
    def feasible_mass(self) -> float:
        """Σ_{f<∞} g·σ"""
        return float(self.g @ self.effective_sigma)

    def is_feasible(self) -> bool:
        return self.feasible_mass >= self.normalization * (1.0 - FEASIBILITY_RTOL)

    def is_strictly_feasible(self) -> bool:
        return self.feasible_mass > self.normalization * (1.0 + FEASIBILITY_RTOL)

    def require_feasible(self, strict: bool = False) -> None:
        ok = self.is_strictly_feasible() if strict else self.is_feasible()
        if not ok:
            relation = ">" if strict else ">="
            raise InfeasibleProblemError(
                f"feasible set is empty: sum over finite-f points of g*sigma = {self.feasible_mass:.17g}, "
                f"needs {relation} {self.normalization:.17g}"
            )

    def contains(self, nu: DiscreteMeasure, atol: float = 1e-10) -> bool:
        """ν 가 허용 집합에 속하는지 (질량 조건은 atol 까지)"""
        w = nu.weights
        if w.size != self.size:
            return False
        sigma = self.effective_sigma
        within_box = np.all(w <= sigma + atol * np.maximum(1.0, sigma))
        return bool(within_box and abs(self.g @ w - self.normalization) <= atol)

    def with_sigma(self, sigma: DiscreteMeasure) -> "Problem":
        return replace(self, sigma=sigma)

    def fingerprint(self) -> str:
        """문제 데이터의 SHA-256 지문"""
        return array_digest(self.matrix.entries, self.g, self.f, self.sigma.weights,
                            np.array([self.normalization]))


def build_problem(matrix: KernelMatrix,
                  sigma: DiscreteMeasure,
                  g: Union[float, Sequence[float], np.ndarray] = 1.0,
                  field: Optional[FieldSpec] = None,
                  normalization: float = 1.0) -> Problem:
    """
    커널 행렬과 데이터로 Problem 을 만듭니다.

    Args:
        matrix: 조립된 커널 행렬
        sigma: 상한 측도
        g: 양의 가중치 (상수 또는 점별 벡터)
        field: 외부장 (기본값 f ≡ 0)
        normalization: ⟨g, ν⟩ 의 목표값

    Returns:
        Problem: f 가 풀린 문제
    """
    n = matrix.size
    g_vec = np.full(n, float(g)) if np.isscalar(g) else np.asarray(g, dtype=float)
    field = field if field is not None else zero_field(n)
    f = resolve_field(matrix, field)
    problem = Problem(matrix, g_vec, f, field, sigma, normalization)
    logger.debug(f"문제 생성: N={n}, g·σ={problem.feasible_mass:.6g}, f=∞ 인 점 {int((~problem.finite_mask).sum())}개")
    return problem
