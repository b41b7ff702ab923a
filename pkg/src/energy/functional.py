# -*- coding: utf-8 -*-
"""에너지, 퍼텐셜, f-가중 퍼텐셜 W^f_ν 와 f-가중 에너지 G_f(ν)."""
import logging
import math
from typing import Union

import numpy as np

from src.energy.field import CaseII
from src.energy.measure import DiscreteMeasure, as_weights
from src.energy.problem import Problem
from src.errors import MeasureError, NotPositiveDefiniteError
from src.kernels.matrix import KernelMatrix

logger = logging.getLogger(__name__)

Weights = Union[DiscreteMeasure, np.ndarray]

RADICAND_TOL = 1e-12


def _aligned(m: KernelMatrix, *measures: Weights) -> list:
    arrays = [as_weights(nu) for nu in measures]
    for w in arrays:
        if w.shape != (m.size,):
            raise MeasureError(f"measure of size {w.size} is not aligned with matrix of size {m.size}")
    return arrays


def energy(m: KernelMatrix, nu: Weights) -> float:
    """‖ν‖² = ν^T M ν"""
    (w,) = _aligned(m, nu)
    return float(w @ m.entries @ w)


def mutual_energy(m: KernelMatrix, nu: Weights, mu: Weights) -> float:
    """κ(ν, μ) = ν^T M μ"""
    w, v = _aligned(m, nu, mu)
    return float(w @ m.entries @ v)


def potential(m: KernelMatrix, nu: Weights) -> np.ndarray:
    """κ_ν 를 모든 점에서 평가한 Mν"""
    (w,) = _aligned(m, nu)
    return m.entries @ w


def weighted_potential(p: Problem, nu: Weights) -> np.ndarray:
    """W^f_ν = κ_ν + f (f = ∞ 인 점은 ∞)"""
    return potential(p.matrix, nu) + p.f


def finite_dot(values: np.ndarray, weights: np.ndarray) -> float:
    """
    0·∞ = 0 규약의 내적.

    가중치가 양수인 점의 값이 +∞ 이면 +∞ 를 돌려줍니다.
    """
    finite = np.isfinite(values)
    if np.any(weights[~finite] > 0):
        return math.inf
    return float(values[finite] @ weights[finite])


def weighted_energy(p: Problem, nu: Weights) -> float:
    """G_f(ν) = ‖ν‖² + 2⟨f, ν⟩ (f = ∞ 인 점에 질량이 있으면 +∞)"""
    (w,) = _aligned(p.matrix, nu)
    linear = finite_dot(p.f, w)
    if math.isinf(linear):
        return math.inf
    return energy(p.matrix, w) + 2.0 * linear


def strong_distance(m: KernelMatrix, nu: Weights, mu: Weights) -> float:
    """에너지 노름 거리 ‖ν − μ‖"""
    w, v = _aligned(m, nu, mu)
    d = w - v
    radicand = float(d @ m.entries @ d)
    if radicand < 0.0:
        scale = float(np.abs(d) @ np.abs(m.entries) @ np.abs(d))
        if radicand < -RADICAND_TOL * max(1.0, scale):
            raise NotPositiveDefiniteError(
                f"negative squared strong distance {radicand:.3e}; the kernel matrix is not positive definite",
                min_pivot=None,
            )
        radicand = 0.0
    return math.sqrt(radicand)


def lower_bound(p: Problem) -> float:
    """
    허용 집합 위에서 G_f 의 하한.

    Case II: G_f(ν) = ‖ν + ζ‖² − ‖ζ‖² ≥ −‖ζ‖².
    Case I: ‖ν‖² ≥ 0 과 ⟨1, ν⟩ ≤ c / min(g) 에서 2·min(f, 0)·c / min(g).
    """
    if isinstance(p.field, CaseII):
        return -energy(p.matrix, p.field.charge)
    finite_f = p.f[p.finite_mask]
    if finite_f.size == 0:
        return math.inf
    smallest = min(float(finite_f.min()), 0.0)
    return 2.0 * smallest * p.normalization / float(p.g.min())
