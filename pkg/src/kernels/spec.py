# -*- coding: utf-8 -*-
"""완전(perfect) 커널: Riesz, 단위 원판 위의 로그 커널, 공/원판의 Green 커널."""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Optional

import numpy as np

from src.errors import InadmissiblePointError, KernelError

logger = logging.getLogger(__name__)


class KernelKind(str, Enum):
    RIESZ = "riesz"
    LOG_DISK = "log_disk"
    GREEN_BALL = "green_ball"


@dataclass(frozen=True)
class KernelSpec:
    """커널 종류와 매개변수"""

    kind: KernelKind
    dim: int
    alpha: Optional[float] = None
    radius: Optional[float] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", KernelKind(self.kind))
        if self.dim < 1:
            raise KernelError(f"dim must be positive, got {self.dim}")
        if self.kind is KernelKind.RIESZ:
            if self.alpha is None or not 0.0 < self.alpha < self.dim:
                raise KernelError(f"Riesz kernel requires 0 < alpha < dim={self.dim}, got alpha={self.alpha}")
        elif self.kind is KernelKind.LOG_DISK:
            if self.dim != 2:
                raise KernelError(f"logarithmic kernel is only offered in dim 2, got {self.dim}")
        elif self.kind is KernelKind.GREEN_BALL:
            if self.radius is None or not self.radius > 0:
                raise KernelError(f"Green kernel requires a positive radius, got {self.radius}")
            if self.dim < 2:
                raise KernelError(f"Green kernel requires dim >= 2, got {self.dim}")

    # ------------------------------------------------------------------
    @classmethod
    def riesz(cls, alpha: float, dim: int) -> "KernelSpec":
        return cls(KernelKind.RIESZ, dim, alpha=float(alpha))

    @classmethod
    def newtonian(cls, dim: int) -> "KernelSpec":
        if dim < 3:
            raise KernelError(f"Newtonian kernel requires dim >= 3, got {dim}")
        return cls.riesz(2.0, dim)

    @classmethod
    def log_disk(cls) -> "KernelSpec":
        return cls(KernelKind.LOG_DISK, 2)

    @classmethod
    def green_ball(cls, radius: float, dim: int) -> "KernelSpec":
        return cls(KernelKind.GREEN_BALL, dim, radius=float(radius))

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"kind": self.kind.value, "dim": self.dim}
        if self.alpha is not None:
            data["alpha"] = self.alpha
        if self.radius is not None:
            data["radius"] = self.radius
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "KernelSpec":
        try:
            kind = KernelKind(data["kind"])
        except (KeyError, ValueError) as e:
            raise KernelError(f"unknown kernel kind: {data.get('kind')}") from e
        alpha = data.get("alpha")
        radius = data.get("radius")
        return cls(kind, int(data["dim"]),
                   alpha=None if alpha is None else float(alpha),
                   radius=None if radius is None else float(radius))

    # ------------------------------------------------------------------
    def check_admissible(self, points: np.ndarray) -> None:
        """모든 점이 커널의 허용 영역 안에 있는지 확인"""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if points.shape[-1] != self.dim:
            raise InadmissiblePointError(f"points have dimension {points.shape[-1]}, kernel expects {self.dim}")
        if self.kind is KernelKind.RIESZ:
            return
        bound = 1.0 if self.kind is KernelKind.LOG_DISK else self.radius
        norms = np.linalg.norm(points, axis=-1)
        outside = np.flatnonzero(norms >= bound)
        if outside.size:
            raise InadmissiblePointError(
                f"{outside.size} point(s) outside the open ball of radius {bound:g} "
                f"(first index {outside[0]}, |x|={norms[outside[0]]:.6g})"
            )

    @property
    def exponent(self) -> float:
        """Riesz/Newton 지수 α − n"""
        if self.kind is KernelKind.RIESZ:
            return self.alpha - self.dim
        return 2.0 - self.dim

    def singular_part(self, distance: np.ndarray) -> np.ndarray:
        """거리의 함수인 기본해 부분"""
        with np.errstate(divide="ignore"):
            if self.kind is KernelKind.LOG_DISK or (self.kind is KernelKind.GREEN_BALL and self.dim == 2):
                return -np.log(distance)
            return np.power(distance, self.exponent)

    def _reflected_distance(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """|y|/R · |x − y*|, y* = R² y / |y|² (y = 0 이면 R)"""
        r2 = self.radius ** 2
        xx = np.sum(x * x, axis=-1)
        yy = np.sum(y * y, axis=-1)
        xy = np.sum(x * y, axis=-1)
        return np.sqrt(np.maximum(xx * yy / r2 - 2.0 * xy + r2, 0.0))

    def pair_values(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """브로드캐스팅되는 점 쌍들의 커널 값 (대각선은 +inf)"""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        distance = np.linalg.norm(x - y, axis=-1)
        values = self.singular_part(distance)
        if self.kind is KernelKind.GREEN_BALL:
            values = values - self.singular_part(self._reflected_distance(x, y))
        return values

    def self_values(self, x: np.ndarray, h: np.ndarray) -> np.ndarray:
        """유효 자기거리 h 에서의 대각 성분 (Green 은 정칙 부분을 y = x 에서 평가)"""
        values = self.singular_part(np.asarray(h, dtype=float))
        if self.kind is KernelKind.GREEN_BALL:
            x = np.asarray(x, dtype=float)
            values = values - self.singular_part(self._reflected_distance(x, x))
        return values


def kernel_value(spec: KernelSpec, x, y) -> float:
    """
    두 점 사이의 커널 값 κ(x, y).

    Riesz: |x−y|^{α−n}, LogDisk: −log|x−y|, GreenBall: 공/원판의 닫힌 형태 Green 함수.
    x = y 이면 +inf.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    spec.check_admissible(np.vstack([x, y]))
    return float(spec.pair_values(x, y))
