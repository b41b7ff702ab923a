# -*- coding: utf-8 -*-
"""닫힌 집합 Σ ⊂ R^n 의 유한 점 구름 이산화."""
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.spatial import cKDTree

from src.errors import DuplicatePointError, GeometryError
from src.utils import FLOAT_FORMAT

logger = logging.getLogger(__name__)

GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))


@dataclass(frozen=True, eq=False)
class PointCloud:
    """영역 라벨이 붙은 점 구름 (생성 후 불변)"""

    dim: int
    points: np.ndarray
    region: Tuple[str, ...]

    def __post_init__(self) -> None:
        if int(self.dim) < 1:
            raise GeometryError(f"dim must be positive, got {self.dim}")
        points = np.array(self.points, dtype=float)
        if points.size == 0:
            points = points.reshape(0, int(self.dim))
        if points.ndim != 2 or points.shape[1] != self.dim:
            raise GeometryError(f"points must have shape (N, {self.dim}), got {points.shape}")
        if not np.all(np.isfinite(points)):
            raise GeometryError("point coordinates must be finite")
        region = tuple(str(r) for r in self.region)
        if len(region) != points.shape[0]:
            raise GeometryError(f"region labels ({len(region)}) do not match points ({points.shape[0]})")
        points.setflags(write=False)
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "region", region)
        min_dist = self.min_pairwise_distance()
        if min_dist <= 0.0:
            raise DuplicatePointError("point cloud contains coincident points")

    @classmethod
    def empty(cls, dim: int) -> "PointCloud":
        return cls(dim, np.empty((0, dim)), ())

    @property
    def size(self) -> int:
        return self.points.shape[0]

    def __len__(self) -> int:
        return self.size

    def regions(self) -> List[str]:
        """영역 라벨 (처음 등장한 순서)"""
        return list(dict.fromkeys(self.region))

    def indices_of(self, region: str) -> np.ndarray:
        """해당 영역에 속한 점들의 인덱스"""
        return np.array([i for i, r in enumerate(self.region) if r == region], dtype=int)

    def subset(self, indices: Sequence[int]) -> "PointCloud":
        idx = np.asarray(indices, dtype=int)
        return PointCloud(self.dim, self.points[idx], tuple(self.region[i] for i in idx))

    def min_pairwise_distance(self) -> float:
        if self.size < 2:
            return math.inf
        return float(self.nearest_neighbor_distances().min())

    def nearest_neighbor_distances(self) -> np.ndarray:
        """각 점에서 가장 가까운 다른 점까지의 거리"""
        if self.size < 2:
            raise GeometryError("nearest neighbour needs at least two points")
        distances, _ = cKDTree(self.points).query(self.points, k=2)
        return distances[:, 1]

    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.points, axis=1)

    # ------------------------------------------------------------------
    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.points, columns=[f"x{k}" for k in range(self.dim)])
        frame["region"] = list(self.region)
        return frame

    def to_csv(self, path: Union[str, Path]) -> None:
        """헤더 `x0,...,x{dim-1},region` 형식의 CSV로 저장"""
        self.to_frame().to_csv(path, index=False, float_format=FLOAT_FORMAT, encoding="utf-8")

    @classmethod
    def from_csv(cls, path: Union[str, Path]) -> "PointCloud":
        frame = pd.read_csv(path, float_precision="round_trip", encoding="utf-8", dtype={"region": str})
        coords = [c for c in frame.columns if c.startswith("x")]
        if "region" not in frame.columns or not coords:
            raise GeometryError(f"{path}: expected columns x0..x(dim-1),region")
        expected = [f"x{k}" for k in range(len(coords))]
        if coords != expected:
            raise GeometryError(f"{path}: coordinate columns must be {expected}, got {coords}")
        return cls(len(coords), frame[coords].to_numpy(dtype=float), tuple(frame["region"].astype(str)))


def make_sphere(dim: int, radius: float, count: int, region: Optional[str] = None) -> PointCloud:
    """
    원점 중심, 반지름 radius 인 구면 위의 결정적 점 배치를 만듭니다.

    Args:
        dim: 2 (원) 또는 3 (구면)
        radius: 반지름 (> 0)
        count: 점 개수 (>= 4)
        region: 영역 라벨 (기본값 "S(0,radius)")

    Returns:
        PointCloud: dim=2 에서는 등간격 각도, dim=3 에서는 피보나치 나선 배치
    """
    if dim not in (2, 3):
        raise GeometryError(f"make_sphere supports dim 2 or 3, got {dim}")
    if not radius > 0:
        raise GeometryError(f"radius must be positive, got {radius}")
    if count < 4:
        raise GeometryError(f"count must be at least 4, got {count}")
    label = region or f"S(0,{radius:g})"
    k = np.arange(count, dtype=float)
    if dim == 2:
        angle = 2.0 * math.pi * k / count
        unit = np.column_stack([np.cos(angle), np.sin(angle)])
    else:
        z = 1.0 - (2.0 * k + 1.0) / count
        rho = np.sqrt(1.0 - z * z)
        phi = k * GOLDEN_ANGLE
        unit = np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])
    # 수치 오차로 반지름이 흔들리지 않도록 다시 정규화
    unit /= np.linalg.norm(unit, axis=1)[:, None]
    cloud = PointCloud(dim, radius * unit, (label,) * count)
    logger.debug(f"구면 생성: dim={dim}, R={radius}, N={count}")
    return cloud


def make_interval(a: float, b: float, count: int, dim: int, region: Optional[str] = None) -> PointCloud:
    """첫 번째 좌표축 위의 선분 [a, b]를 양 끝점 포함 등간격으로 나눕니다."""
    if not a < b:
        raise GeometryError(f"interval requires a < b, got a={a}, b={b}")
    if count < 2:
        raise GeometryError(f"count must be at least 2, got {count}")
    if dim < 1:
        raise GeometryError(f"dim must be positive, got {dim}")
    points = np.zeros((count, dim))
    points[:, 0] = np.linspace(a, b, count)
    return PointCloud(dim, points, (region or f"[{a:g},{b:g}]",) * count)


def union(a: PointCloud, b: PointCloud) -> PointCloud:
    """a 의 점 다음에 b 의 점을 이어 붙입니다 (영역 라벨 유지)."""
    if a.dim != b.dim:
        raise GeometryError(f"dimension mismatch: {a.dim} vs {b.dim}")
    if a.size == 0:
        return b
    if b.size == 0:
        return a
    distances, _ = cKDTree(a.points).query(b.points, k=1)
    if np.any(distances <= 0.0):
        raise DuplicatePointError("union would contain coincident points")
    return PointCloud(a.dim, np.vstack([a.points, b.points]), a.region + b.region)
