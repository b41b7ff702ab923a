# -*- coding: utf-8 -*-
"""외부장 f: Case I (하한이 있는 점별 값) 와 Case II (부호 있는 전하 ζ 의 퍼텐셜)."""
import json
import logging
from dataclasses import dataclass
from typing import Any, Dict, Sequence, Union

import numpy as np

from src.energy.measure import DiscreteMeasure
from src.errors import MeasureError
from src.geometry.point_cloud import PointCloud
from src.arrays import json_array
from src.utils import parse_json_float

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class CaseI:
    """점마다 주어진 확장 실수 값 (−∞ 금지, +∞ 허용)"""

    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float).ravel()
        if np.any(np.isnan(values)):
            raise MeasureError("field values must not be NaN")
        if np.any(values == -np.inf):
            raise MeasureError("field values must be bounded below (no -inf)")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def size(self) -> int:
        return self.values.size


@dataclass(frozen=True, eq=False)
class CaseII:
    """f = κ_ζ, ζ = ζ⁺ − ζ⁻"""

    zeta_plus: DiscreteMeasure
    zeta_minus: DiscreteMeasure

    def __post_init__(self) -> None:
        if self.zeta_plus.size != self.zeta_minus.size:
            raise MeasureError(
                f"charge parts differ in size: {self.zeta_plus.size} vs {self.zeta_minus.size}"
            )

    @property
    def size(self) -> int:
        return self.zeta_plus.size

    @property
    def charge(self) -> np.ndarray:
        """부호 있는 가중치 ζ⁺ − ζ⁻"""
        return self.zeta_plus.weights - self.zeta_minus.weights


FieldSpec = Union[CaseI, CaseII]


def zero_field(n: int) -> CaseI:
    return CaseI(np.zeros(n))


def radial_field(cloud: PointCloud, pole: Sequence[float], alpha: float) -> CaseI:
    """
    극점 a 에 대한 방사형 외부장 f(x) = |x − a|^{α−n}.

    극점과 일치하는 점의 값은 +∞ 입니다.
    """
    pole = np.asarray(pole, dtype=float).ravel()
    if pole.size != cloud.dim:
        raise MeasureError(f"pole has dimension {pole.size}, cloud has {cloud.dim}")
    exponent = float(alpha) - cloud.dim
    distance = np.linalg.norm(cloud.points - pole, axis=1)
    with np.errstate(divide="ignore"):
        values = np.power(distance, exponent)
    values[distance == 0.0] = np.inf
    logger.debug(f"방사형 외부장: 극점 {pole.tolist()}, 지수 {exponent:g}, 최소 거리 {distance.min():.3e}")
    return CaseI(values)


def resolve_field(matrix, field: FieldSpec) -> np.ndarray:
    """
    외부장을 점 구름 위의 벡터로 풉니다.

    Args:
        matrix: KernelMatrix (Case II 퍼텐셜 계산용)
        field: CaseI 또는 CaseII

    Returns:
        np.ndarray: 길이 N 확장 실수 벡터
    """
    if field.size != matrix.size:
        raise MeasureError(f"field has size {field.size}, matrix has {matrix.size}")
    if isinstance(field, CaseI):
        return np.array(field.values)
    m = matrix.entries
    for name, part in (("zeta_plus", field.zeta_plus), ("zeta_minus", field.zeta_minus)):
        part_energy = float(part.weights @ m @ part.weights)
        if not np.isfinite(part_energy):
            raise MeasureError(f"charge part {name} has non-finite energy")
    return m @ field.charge


# ----------------------------------------------------------------------
def field_to_dict(field: FieldSpec) -> Dict[str, Any]:
    if isinstance(field, CaseI):
        return {"case": "I", "values": json_array(field.values)}
    return {
        "case": "II",
        "zeta_plus": field.zeta_plus.weights.tolist(),
        "zeta_minus": field.zeta_minus.weights.tolist(),
    }


def field_from_dict(data: Dict[str, Any]) -> FieldSpec:
    case = str(data.get("case", "")).upper()
    if case == "I":
        return CaseI(np.array([parse_json_float(v) for v in data["values"]], dtype=float))
    if case == "II":
        return CaseII(DiscreteMeasure(data["zeta_plus"]), DiscreteMeasure(data["zeta_minus"]))
    raise MeasureError(f"unknown field case: {data.get('case')}")


def field_to_json(field: FieldSpec) -> str:
    return json.dumps(field_to_dict(field))


def field_from_json(text: str) -> FieldSpec:
    return field_from_dict(json.loads(text))
