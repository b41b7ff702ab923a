# -*- coding: utf-8 -*-
"""허용 다면체 {0 ≤ ν ≤ σ, ⟨g, ν⟩ = c} 위의 선형 최소화, 초기점, 사영."""
import logging

import numpy as np

from src.energy.measure import DiscreteMeasure
from src.energy.problem import FEASIBILITY_RTOL, Problem
from src.errors import InfeasibleProblemError, MeasureError

logger = logging.getLogger(__name__)

PROJECTION_TOL = 1e-12
MAX_BISECTIONS = 200


def greedy_fill(keys: np.ndarray, g: np.ndarray, caps: np.ndarray, target: float) -> np.ndarray:
    """
    keys 오름차순(동률은 인덱스 순)으로 caps 까지 채워 g-질량 target 에 도달하면 멈춥니다.

    마지막 인덱스는 부분적으로 채웁니다.
    """
    n = keys.size
    order = np.argsort(keys, kind="stable")
    cumulative = np.cumsum(g[order] * caps[order])
    total = float(cumulative[-1]) if n else 0.0
    if total < target * (1.0 - FEASIBILITY_RTOL):
        raise InfeasibleProblemError(f"available g-mass {total:.17g} is below the required {target:.17g}")
    nu = np.zeros(n)
    k = int(np.searchsorted(cumulative, target, side="left"))
    if k >= n:
        # 허용 오차 안에서 모자라는 경우: 전부 채움
        return caps.copy()
    head = order[:k]
    nu[head] = caps[head]
    filled = float(cumulative[k - 1]) if k > 0 else 0.0
    last = order[k]
    nu[last] = min(max((target - filled) / g[last], 0.0), caps[last])
    return nu


def lp_oracle(c: np.ndarray, p: Problem) -> DiscreteMeasure:
    """
    허용 집합 위에서 ⟨c, ν⟩ 를 최소화하는 꼭짓점.

    c = ∞ 인 점과 f = ∞ 인 점에는 질량을 두지 않습니다.
    """
    c = np.asarray(c, dtype=float)
    if c.shape != (p.size,):
        raise MeasureError(f"cost vector of size {c.size} is not aligned with problem of size {p.size}")
    if np.any(np.isnan(c)) or np.any(c == -np.inf):
        raise MeasureError("cost vector must not contain NaN or -inf")
    caps = np.where(np.isfinite(c), p.effective_sigma, 0.0)
    return DiscreteMeasure(greedy_fill(c / p.g, p.g, caps, p.normalization))


def feasible_point(p: Problem) -> DiscreteMeasure:
    """f/g 오름차순으로 σ-질량을 채운 허용 측도"""
    p.require_feasible()
    return lp_oracle(p.f, p)


def project_box_hyperplane(v: np.ndarray, p: Problem) -> DiscreteMeasure:
    """
    v 의 허용 집합 위로의 유클리드 사영.

    ν(t) = clip(v − t·g, 0, σ) 이고 t 는 단조 함수 ⟨g, ν(t)⟩ − c 의 이분법으로 찾은 뒤
    자유 좌표 위에서 닫힌 형태로 한 번 보정합니다.
    """
    p.require_feasible()
    v = np.asarray(v, dtype=float)
    if v.shape != (p.size,):
        raise MeasureError(f"vector of size {v.size} is not aligned with problem of size {p.size}")
    if np.any(np.isnan(v)):
        raise MeasureError("cannot project a vector containing NaN")
    g = p.g
    sigma = p.effective_sigma
    target = p.normalization
    active = sigma > 0
    # σ = 0 인 좌표는 t 와 무관하게 0
    v = np.where(active, v, 0.0)

    def clipped(t: float) -> np.ndarray:
        return np.clip(v - t * g, 0.0, sigma)

    def residual(t: float) -> float:
        return float(g @ clipped(t)) - target

    lo = float(np.min((v[active] - sigma[active]) / g[active]))
    hi = float(np.max(v[active] / g[active]))
    tol = PROJECTION_TOL * max(1.0, target)
    t = 0.5 * (lo + hi)
    for _ in range(MAX_BISECTIONS):
        t = 0.5 * (lo + hi)
        r = residual(t)
        if abs(r) <= tol or hi - lo <= 1e-16 * max(1.0, abs(t)):
            break
        if r > 0:
            lo = t
        else:
            hi = t

    shifted = v - t * g
    free = active & (shifted > 0.0) & (shifted < sigma)
    capped = active & (shifted >= sigma)
    if np.any(free):
        refined = (float(g[free] @ v[free]) - (target - float(g[capped] @ sigma[capped]))) / float(g[free] @ g[free])
        if abs(residual(refined)) <= abs(residual(t)):
            t = refined
    nu = clipped(t)
    logger.debug(f"사영: t={t:.17g}, 잔차={residual(t):.3e}")
    return DiscreteMeasure(nu)
