# -*- coding: utf-8 -*-
"""수렴 정리에 쓰이는 중첩 부분집합 족 (감소 족 / 증가하는 소진 족)."""
import logging
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from src.errors import GeometryError
from src.geometry.point_cloud import PointCloud

logger = logging.getLogger(__name__)

DECREASING = "decreasing"
INCREASING = "increasing"


@dataclass(frozen=True, eq=False)
class SubsetFamily:
    """기준 점 구름 위의 순서 있는 인덱스 집합 열"""

    base: PointCloud
    stages: Tuple[np.ndarray, ...]
    kind: str

    def __post_init__(self) -> None:
        if self.kind not in (DECREASING, INCREASING):
            raise GeometryError(f"unknown family kind: {self.kind}")
        if not self.stages:
            raise GeometryError("a subset family needs at least one stage")
        stages = []
        for stage in self.stages:
            idx = np.unique(np.asarray(stage, dtype=int))
            if idx.size and (idx[0] < 0 or idx[-1] >= self.base.size):
                raise GeometryError(f"stage index out of range for cloud of size {self.base.size}")
            idx.setflags(write=False)
            stages.append(idx)
        object.__setattr__(self, "stages", tuple(stages))
        if not self.is_monotone():
            raise GeometryError(f"stages are not {self.kind}")

    def __len__(self) -> int:
        return len(self.stages)

    def sizes(self) -> list:
        return [int(s.size) for s in self.stages]

    def is_monotone(self) -> bool:
        """감소 족이면 stages[k+1] ⊆ stages[k], 증가 족이면 stages[k] ⊆ stages[k+1]"""
        for current, following in zip(self.stages, self.stages[1:]):
            inner, outer = (following, current) if self.kind == DECREASING else (current, following)
            if not np.all(np.isin(inner, outer)):
                return False
        return True

    def mask(self, k: int) -> np.ndarray:
        mask = np.zeros(self.base.size, dtype=bool)
        mask[self.stages[k]] = True
        return mask


def space_filling_order(cloud: PointCloud) -> np.ndarray:
    """영역 (처음 등장한 순서) 다음 생성 순서로 정렬한 결정적 인덱스 순서"""
    rank = {name: k for k, name in enumerate(cloud.regions())}
    keys = np.array([rank[r] for r in cloud.region], dtype=int)
    return np.argsort(keys, kind="stable")


def nested_exhaustion(cloud: PointCloud, fractions: Sequence[float]) -> SubsetFamily:
    """
    점 구름을 안쪽부터 채워 나가는 증가 족을 만듭니다.

    Args:
        cloud: 기준 점 구름
        fractions: (0, 1] 안의 순증가 비율, 마지막 값은 1

    Returns:
        SubsetFamily: stages[k] = 결정적 순서의 처음 ceil(fractions[k]·N) 개 인덱스
    """
    fractions = [float(f) for f in fractions]
    if not fractions:
        raise GeometryError("fractions must not be empty")
    if any(not 0.0 < f <= 1.0 for f in fractions):
        raise GeometryError(f"fractions must lie in (0, 1], got {fractions}")
    if any(b <= a for a, b in zip(fractions, fractions[1:])):
        raise GeometryError(f"fractions must be strictly increasing, got {fractions}")
    if fractions[-1] != 1.0:
        raise GeometryError("the last fraction must be 1")
    order = space_filling_order(cloud)
    n = cloud.size
    # 0.25*100 같은 값이 부동소수점 때문에 26개로 올림되지 않도록 약간 내림
    counts = [min(n, math.ceil(f * n - 1e-9)) for f in fractions]
    family = SubsetFamily(cloud, tuple(order[:c] for c in counts), INCREASING)
    logger.debug(f"소진 족 생성: 크기 {family.sizes()}")
    return family


def decreasing_family(cloud: PointCloud, stages: Sequence[Sequence[int]]) -> SubsetFamily:
    """검사된 감소 족 (Σ_s 의 유한 사슬)"""
    return SubsetFamily(cloud, tuple(np.asarray(s, dtype=int) for s in stages), DECREASING)
