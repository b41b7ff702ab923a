# -*- coding: utf-8 -*-
"""점 구름 위에 조립된 대칭 양의 정부호 커널 행렬."""
import logging
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
import pandas as pd
import scipy.linalg

from src.errors import DuplicatePointError, KernelError, NotPositiveDefiniteError
from src.geometry.point_cloud import PointCloud
from src.kernels.spec import KernelSpec
from src.utils import FLOAT_FORMAT

logger = logging.getLogger(__name__)

HALF_NEAREST_NEIGHBOR = "half_nearest_neighbor"


@dataclass(frozen=True, eq=False)
class DiagPolicy:
    """대각(자기 에너지) 정규화 기록"""

    rule: str
    h: Optional[np.ndarray] = None


@dataclass(frozen=True)
class PDCheck:
    """양의 정부호 검사 결과. 실패 시 min_pivot 은 가장 작은 고유값"""

    ok: bool
    min_pivot: float
    failed_at: Optional[int] = None


@dataclass(frozen=True, eq=False)
class KernelMatrix:
    """조립된 N×N 커널 행렬 (불변)"""

    spec: Optional[KernelSpec]
    cloud: Optional[PointCloud]
    entries: np.ndarray
    diag_policy: DiagPolicy = field(default_factory=lambda: DiagPolicy("given"))

    def __post_init__(self) -> None:
        entries = np.array(self.entries, dtype=float)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise KernelError(f"kernel matrix must be square, got shape {entries.shape}")
        if not np.all(np.isfinite(entries)):
            raise KernelError("kernel matrix entries must be finite")
        if not np.array_equal(entries, entries.T):
            raise KernelError("kernel matrix must be exactly symmetric")
        if self.cloud is not None and self.cloud.size != entries.shape[0]:
            raise KernelError(f"matrix size {entries.shape[0]} does not match cloud size {self.cloud.size}")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @classmethod
    def synthetic(cls, entries: Union[np.ndarray, Sequence[Sequence[float]]]) -> "KernelMatrix":
        """직접 만든 대칭 행렬 (예제와 시험용 문제)"""
        return cls(None, None, np.asarray(entries, dtype=float))

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    @cached_property
    def pd_check(self) -> PDCheck:
        return check_pd(self)

    @cached_property
    def max_eigenvalue(self) -> float:
        """투영 경사법 보폭에 쓰는 가장 큰 고유값"""
        if self.size == 0:
            return 0.0
        return float(scipy.linalg.eigvalsh(self.entries, subset_by_index=[self.size - 1, self.size - 1])[0])

    def restrict(self, indices: Sequence[int]) -> "KernelMatrix":
        """부분 행렬 (원래 대각 성분 유지)"""
        idx = np.asarray(indices, dtype=int)
        cloud = self.cloud.subset(idx) if self.cloud is not None else None
        h = self.diag_policy.h[idx] if self.diag_policy.h is not None else None
        return KernelMatrix(self.spec, cloud, self.entries[np.ix_(idx, idx)],
                            DiagPolicy(self.diag_policy.rule, h))

    def to_csv(self, path: Union[str, Path]) -> None:
        """디버깅용 N×N 덤프"""
        pd.DataFrame(self.entries).to_csv(path, index=False, header=False, float_format=FLOAT_FORMAT)


def assemble(spec: KernelSpec, cloud: PointCloud, verify_pd: bool = True) -> KernelMatrix:
    """
    점 구름 위의 커널 행렬을 조립합니다.

    비대각 성분은 kernel_value, 대각 성분은 가장 가까운 이웃까지 거리의 절반 h_i 에서의 값입니다.
    verify_pd 가 참이면 Cholesky 분해가 실패할 때 NotPositiveDefiniteError 를 발생시킵니다.
    """
    if spec.dim != cloud.dim:
        raise KernelError(f"kernel dim {spec.dim} does not match cloud dim {cloud.dim}")
    if cloud.size < 2:
        raise KernelError("assembly needs at least two points")
    spec.check_admissible(cloud.points)
    points = cloud.points
    n = cloud.size
    logger.info(f"커널 행렬 조립 시작: {spec.kind.value}, N={n}")

    upper = np.triu_indices(n, k=1)
    entries = np.zeros((n, n))
    values = spec.pair_values(points[upper[0]], points[upper[1]])
    if not np.all(np.isfinite(values)):
        raise DuplicatePointError("infinite off-diagonal kernel value (coincident points)")
    entries[upper] = values
    entries[(upper[1], upper[0])] = values

    h = 0.5 * cloud.nearest_neighbor_distances()
    np.fill_diagonal(entries, spec.self_values(points, h))
    matrix = KernelMatrix(spec, cloud, entries, DiagPolicy(HALF_NEAREST_NEIGHBOR, h))

    if verify_pd:
        check = matrix.pd_check
        if not check.ok:
            logger.error(f"양의 정부호 검사 실패: 최소 피벗 {check.min_pivot:.3e} - 점 구름을 세분하세요")
            raise NotPositiveDefiniteError(
                f"assembled matrix is not positive definite (min pivot {check.min_pivot:.3e}); refine the cloud",
                min_pivot=check.min_pivot,
            )
        logger.info(f"커널 행렬 조립 완료: 최소 피벗 {check.min_pivot:.3e}")
    return matrix


def check_pd(m: Union[KernelMatrix, np.ndarray]) -> PDCheck:
    """Cholesky 분해가 성공하면 참. 실패해도 예외 대신 False 를 돌려줍니다."""
    entries = m.entries if isinstance(m, KernelMatrix) else np.asarray(m, dtype=float)
    if entries.size == 0:
        return PDCheck(True, float("inf"))
    if not np.array_equal(entries, entries.T):
        return PDCheck(False, float("nan"))
    try:
        factor = scipy.linalg.cholesky(entries, lower=True)
    except np.linalg.LinAlgError as e:
        # LAPACK 메시지의 선행 소행렬 차수를 살려 둡니다
        failed_at = None
        for token in str(e).split():
            if token.isdigit():
                failed_at = int(token) - 1
                break
        smallest = float(scipy.linalg.eigvalsh(entries, subset_by_index=[0, 0])[0])
        return PDCheck(False, smallest, failed_at)
    pivots = np.diag(factor) ** 2
    return PDCheck(bool(np.all(pivots > 0)), float(pivots.min()))
