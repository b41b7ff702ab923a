# -*- coding: utf-8 -*-
"""점 구름에 정렬된 음이 아닌 이산 측도."""
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Sequence, Union

import numpy as np
import pandas as pd

from src.errors import MeasureError
from src.geometry.point_cloud import PointCloud
from src.utils import FLOAT_FORMAT

logger = logging.getLogger(__name__)

ArrayLike = Union[np.ndarray, Sequence[float]]


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """가중치 벡터 ν (ν[i] ≥ 0, 총질량 유한)"""

    weights: np.ndarray

    def __post_init__(self) -> None:
        weights = np.array(self.weights, dtype=float).ravel()
        if not np.all(np.isfinite(weights)):
            raise MeasureError("measure weights must be finite")
        if np.any(weights < 0):
            raise MeasureError(f"measure weights must be nonnegative (min {weights.min():.3e})")
        # -0.0 을 0.0 으로 정리
        weights = weights + 0.0
        weights.setflags(write=False)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def zeros(cls, n: int) -> "DiscreteMeasure":
        return cls(np.zeros(n))

    @classmethod
    def uniform(cls, n: int, mass: float = 1.0) -> "DiscreteMeasure":
        return cls(np.full(n, mass / n))

    @classmethod
    def uniform_per_region(cls, cloud: PointCloud, masses: Dict[str, float]) -> "DiscreteMeasure":
        """영역마다 총질량을 균등하게 나눈 측도 (지정하지 않은 영역은 0)"""
        weights = np.zeros(cloud.size)
        for region, mass in masses.items():
            idx = cloud.indices_of(region)
            if idx.size == 0:
                raise MeasureError(f"unknown region: {region}")
            weights[idx] = float(mass) / idx.size
        return cls(weights)

    @property
    def size(self) -> int:
        return self.weights.size

    def __len__(self) -> int:
        return self.size

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    def support(self, eps: float = 0.0) -> np.ndarray:
        return np.flatnonzero(self.weights > eps)

    def trace(self, indices: Sequence[int]) -> "DiscreteMeasure":
        """인덱스 집합 E 위로의 제한 ν_E"""
        weights = np.zeros(self.size)
        idx = np.asarray(indices, dtype=int)
        weights[idx] = self.weights[idx]
        return DiscreteMeasure(weights)

    def scaled(self, factor: float) -> "DiscreteMeasure":
        return DiscreteMeasure(self.weights * float(factor))

    # ------------------------------------------------------------------
    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"index": np.arange(self.size), "weight": self.weights})

    def to_csv(self, path: Union[str, Path]) -> None:
        """`index,weight` CSV (17자리 유효숫자)"""
        self.to_frame().to_csv(path, index=False, float_format=FLOAT_FORMAT, encoding="utf-8")

    @classmethod
    def from_csv(cls, path: Union[str, Path]) -> "DiscreteMeasure":
        frame = pd.read_csv(path, float_precision="round_trip", encoding="utf-8")
        if list(frame.columns[:2]) != ["index", "weight"]:
            raise MeasureError(f"{path}: expected columns index,weight")
        index = frame["index"].to_numpy(dtype=int)
        if not np.array_equal(index, np.arange(index.size)):
            raise MeasureError(f"{path}: index column must be 0..N-1 in order")
        return cls(frame["weight"].to_numpy(dtype=float))

    def to_json(self) -> str:
        return json.dumps(self.weights.tolist())

    @classmethod
    def from_json(cls, text: str) -> "DiscreteMeasure":
        data = json.loads(text)
        if not isinstance(data, list):
            raise MeasureError("measure JSON must be an array of weights")
        return cls(np.asarray(data, dtype=float))


def as_weights(nu: Union[DiscreteMeasure, ArrayLike]) -> np.ndarray:
    """측도 또는 (부호 있는) 배열을 가중치 배열로"""
    if isinstance(nu, DiscreteMeasure):
        return nu.weights
    return np.asarray(nu, dtype=float)
