# -*- coding: utf-8 -*-
"""구면 위 균등 확률측도의 Riesz 퍼텐셜 (고리 분해 + 적응형 1차원 적분)."""
import logging
import math

from scipy import integrate

from src.errors import KernelError

logger = logging.getLogger(__name__)


def sphere_potential(alpha: float, radius_eval: float, sphere_radius: float = 1.0, dim: int = 3) -> float:
    """
    반지름 sphere_radius 인 2-구면 위 균등 확률측도의 퍼텐셜을 |x| = radius_eval 에서 계산합니다.

    t = cos θ 는 [-1, 1] 에서 균등분포이므로
        U(ρ) = ½ ∫ (R² + ρ² − 2Rρt)^{(α−n)/2} dt.
    """
    if dim != 3:
        raise KernelError(f"sphere potential oracle is implemented for dim 3 only, got {dim}")
    if not 0.0 < alpha < dim:
        raise KernelError(f"alpha must lie in (0, {dim}), got {alpha}")
    if radius_eval < 0 or not sphere_radius > 0:
        raise KernelError("radii must be nonnegative (evaluation) and positive (sphere)")
    half_exponent = 0.5 * (alpha - dim)
    r, rho = float(sphere_radius), float(radius_eval)
    gap2 = (r - rho) ** 2

    def integrand(t: float) -> float:
        return (gap2 + 2.0 * r * rho * (1.0 - t)) ** half_exponent

    if rho == r and half_exponent <= -1.0:
        logger.debug(f"구면 퍼텐셜이 구면 위에서 발산합니다: α={alpha}")
        return math.inf
    if math.isclose(rho, r) and half_exponent > -1.0:
        # t = 1 의 특이점 (1−t)^{(α−n)/2} 는 가중치로 떼어 적분
        def smooth(t: float) -> float:
            u = 1.0 - t
            if u <= 0.0:
                return 0.0 if gap2 > 0.0 else (2.0 * r * rho) ** half_exponent
            return (gap2 / u + 2.0 * r * rho) ** half_exponent

        value, error = integrate.quad(smooth, -1.0, 1.0, weight="alg", wvar=(0.0, half_exponent), limit=400,
                                      epsabs=1e-13, epsrel=1e-12)
    else:
        value, error = integrate.quad(integrand, -1.0, 1.0, limit=400, epsabs=1e-13, epsrel=1e-12)
    logger.debug(f"구면 퍼텐셜 적분: α={alpha}, ρ={rho}, R={r}, 값={value:.12g}, 오차={error:.2e}")
    return 0.5 * value
