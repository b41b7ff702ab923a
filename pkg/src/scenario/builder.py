# -*- coding: utf-8 -*-
"""시나리오 문서로부터 점 구름, 커널 행렬, 문제, 솔버 옵션, 부분집합 족을 만듭니다."""
import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from src.energy.field import CaseI, CaseII, FieldSpec, radial_field, zero_field
from src.energy.measure import DiscreteMeasure
from src.energy.problem import Problem, build_problem
from src.errors import ScenarioError
from src.geometry.family import SubsetFamily, decreasing_family, nested_exhaustion
from src.geometry.point_cloud import PointCloud, make_interval, make_sphere, union
from src.kernels.matrix import KernelMatrix, assemble
from src.kernels.spec import KernelSpec
from src.scenario.config import Scenario
from src.solver.options import SolverOptions
from src.utils import parse_json_float

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class BuiltScenario:
    """조립이 끝난 시나리오"""

    scenario: Scenario
    cloud: Optional[PointCloud]
    matrix: KernelMatrix
    problem: Problem


def _require(block: Dict[str, Any], key: str, where: str) -> Any:
    if key not in block:
        raise ScenarioError(f"{where} block is missing '{key}'")
    return block[key]


def _floats(values: List[Any]) -> np.ndarray:
    return np.array([parse_json_float(v) for v in values], dtype=float)


def _read_column(scenario: Scenario, path: str, column: str, n: int) -> np.ndarray:
    """`index,<column>` CSV 에서 한 열을 읽습니다."""
    frame = pd.read_csv(scenario.resolve_path(path), float_precision="round_trip", encoding="utf-8")
    if "index" not in frame.columns or column not in frame.columns:
        raise ScenarioError(f"{path}: expected columns index,{column}")
    if not np.array_equal(frame["index"].to_numpy(dtype=int), np.arange(n)):
        raise ScenarioError(f"{path}: index column must be 0..{n - 1} in order")
    return frame[column].to_numpy(dtype=float)


# --- geometry ------------------------------------------------------------
def _geometry(scenario: Scenario, block: Dict[str, Any]) -> PointCloud:
    kind = _require(block, "kind", "geometry")
    if kind == "sphere":
        return make_sphere(int(block.get("dim", 3)), float(_require(block, "radius", "geometry")),
                           int(_require(block, "count", "geometry")), block.get("region"))
    if kind == "interval":
        return make_interval(float(_require(block, "a", "geometry")), float(_require(block, "b", "geometry")),
                             int(_require(block, "count", "geometry")), int(block.get("dim", 1)), block.get("region"))
    if kind == "points":
        points = np.asarray(_require(block, "points", "geometry"), dtype=float)
        if points.ndim != 2:
            raise ScenarioError("geometry points must be a list of coordinate lists")
        region = block.get("region", "points")
        return PointCloud(points.shape[1], points, (region,) * points.shape[0])
    if kind == "csv":
        return PointCloud.from_csv(scenario.resolve_path(_require(block, "path", "geometry")))
    if kind == "union":
        parts = _require(block, "parts", "geometry")
        if not parts:
            raise ScenarioError("geometry union needs at least one part")
        cloud = _geometry(scenario, parts[0])
        for part in parts[1:]:
            cloud = union(cloud, _geometry(scenario, part))
        return cloud
    raise ScenarioError(f"unknown geometry kind: {kind}")


def build_cloud(scenario: Scenario) -> Optional[PointCloud]:
    block = scenario.block("geometry")
    if block is None:
        return None
    cloud = _geometry(scenario, block)
    logger.info(f"점 구름 생성: {cloud.size}개 점, 영역 {cloud.regions()}")
    return cloud


# --- kernel --------------------------------------------------------------
def build_matrix(scenario: Scenario, cloud: Optional[PointCloud]) -> KernelMatrix:
    block = dict(scenario.block("kernel"))
    kind = block["kind"]
    if kind == "matrix":
        if "entries" in block:
            return KernelMatrix.synthetic(block["entries"])
        path = scenario.resolve_path(_require(block, "csv", "kernel"))
        return KernelMatrix.synthetic(pd.read_csv(path, header=None, float_precision="round_trip").to_numpy())
    if cloud is None:
        raise ScenarioError("a kernel other than 'matrix' needs a geometry block")
    block.setdefault("dim", cloud.dim)
    if kind == "newtonian":
        spec = KernelSpec.newtonian(int(block["dim"]))
    else:
        spec = KernelSpec.from_dict(block)
    return assemble(spec, cloud)


# --- data vectors --------------------------------------------------------
def build_g(scenario: Scenario, n: int) -> np.ndarray:
    block = scenario.block("g")
    kind = block.get("kind", "constant")
    if kind == "constant":
        return np.full(n, float(block.get("value", 1.0)))
    if kind == "values":
        return _floats(_require(block, "values", "g"))
    if kind == "csv":
        return _read_column(scenario, _require(block, "path", "g"), "g", n)
    raise ScenarioError(f"unknown g kind: {kind}")


def build_field(scenario: Scenario, cloud: Optional[PointCloud], matrix: KernelMatrix) -> FieldSpec:
    block = scenario.block("field")
    kind = block.get("kind", "zero")
    n = matrix.size
    if kind == "zero":
        return zero_field(n)
    if kind == "values":
        return CaseI(_floats(_require(block, "values", "field")))
    if kind == "csv":
        return CaseI(_read_column(scenario, _require(block, "path", "field"), "f", n))
    if kind == "radial":
        if cloud is None:
            raise ScenarioError("a radial field needs a geometry block")
        alpha = block.get("alpha")
        if alpha is None:
            spec = matrix.spec
            alpha = spec.alpha if spec is not None and spec.alpha is not None else 2.0
        return radial_field(cloud, _require(block, "pole", "field"), float(alpha))
    if kind == "charge":
        if "csv" in block:
            path = block["csv"]
            plus = _read_column(scenario, path, "zeta_plus", n)
            minus = _read_column(scenario, path, "zeta_minus", n)
        else:
            plus = _floats(_require(block, "zeta_plus", "field"))
            minus = _floats(_require(block, "zeta_minus", "field"))
        return CaseII(DiscreteMeasure(plus), DiscreteMeasure(minus))
    raise ScenarioError(f"unknown field kind: {kind}")


def build_sigma(scenario: Scenario, cloud: Optional[PointCloud], n: int) -> DiscreteMeasure:
    block = scenario.block("sigma")
    if block is None:
        raise ScenarioError("scenario needs a sigma block")
    kind = _require(block, "kind", "sigma")
    if kind == "per_region":
        if cloud is None:
            raise ScenarioError("per-region sigma needs a geometry block")
        return DiscreteMeasure.uniform_per_region(cloud, dict(_require(block, "masses", "sigma")))
    if kind == "uniform":
        return DiscreteMeasure.uniform(n, float(block.get("mass", 1.0)))
    if kind == "values":
        return DiscreteMeasure(_floats(_require(block, "values", "sigma")))
    if kind == "csv":
        return DiscreteMeasure.from_csv(scenario.resolve_path(_require(block, "path", "sigma")))
    raise ScenarioError(f"unknown sigma kind: {kind}")


def build_scenario(scenario: Scenario) -> BuiltScenario:
    """시나리오 전체를 조립합니다."""
    cloud = build_cloud(scenario)
    matrix = build_matrix(scenario, cloud)
    n = matrix.size
    problem = build_problem(
        matrix,
        build_sigma(scenario, cloud, n),
        build_g(scenario, n),
        build_field(scenario, cloud, matrix),
        float(scenario.block("normalization")),
    )
    return BuiltScenario(scenario, cloud, matrix, problem)


# --- options, family, capacity -------------------------------------------
def build_options(scenario: Scenario, base: Optional[SolverOptions] = None) -> SolverOptions:
    """solver_config.json 기본값 위에 시나리오의 solver 블록을 덮어씁니다."""
    base = base or SolverOptions()
    return base.with_overrides(**scenario.block("solver"))


def _cloud_or_index_base(built: BuiltScenario) -> PointCloud:
    if built.cloud is not None:
        return built.cloud
    # 행렬만 주어진 시나리오: 인덱스 자체를 1차원 좌표로 사용
    n = built.matrix.size
    return PointCloud(1, np.arange(n, dtype=float).reshape(n, 1), ("matrix",) * n)


def build_family(built: BuiltScenario) -> Tuple[str, SubsetFamily, List[Any]]:
    """
    family 블록을 해석합니다.

    Returns:
        (kind, family, schedule): decreasing 이면 schedule 은 단계별 σ, exhaustion 이면 β 목록 (없으면 None)
    """
    block = built.scenario.block("family")
    if block is None:
        raise ScenarioError("scenario has no family block")
    base = _cloud_or_index_base(built)
    sigma = built.problem.sigma
    if block["kind"] == "decreasing":
        scales = [float(s) for s in _require(block, "sigma_scale", "family")]
        stages = block.get("stages")
        if stages is None:
            stages = [np.arange(base.size)] * len(scales)
        family = decreasing_family(base, stages)
        if len(scales) != len(family):
            raise ScenarioError("family sigma_scale must have one entry per stage")
        return "decreasing", family, [sigma.scaled(s) for s in scales]
    family = nested_exhaustion(base, _require(block, "fractions", "family"))
    betas = block.get("beta")
    return "exhaustion", family, None if betas is None else [float(b) for b in betas]


def capacity_subset(scenario: Scenario, cloud: Optional[PointCloud], n: int) -> np.ndarray:
    block = scenario.block("capacity")
    if block.get("subset") is not None:
        return np.asarray(block["subset"], dtype=int)
    if block.get("region") is not None:
        if cloud is None:
            raise ScenarioError("capacity region needs a geometry block")
        return cloud.indices_of(block["region"])
    return np.arange(n)
