# -*- coding: utf-8 -*-
"""솔버 기본 설정 파일(solver_config.json)과 시나리오 JSON 로더."""
import copy
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional, Union

from src.errors import InputError, ScenarioError
from src.solver.options import Algorithm, SolverOptions, StepRule
from src.utils import get_app_root

logger = logging.getLogger(__name__)

SOLVER_CONFIG_FILE = "solver_config.json"

DEFAULT_SCENARIO: Dict[str, Any] = {
    "name": "scenario",
    "geometry": None,
    "kernel": None,
    "g": {"kind": "constant", "value": 1.0},
    "field": {"kind": "zero"},
    "sigma": None,
    "normalization": 1.0,
    "solver": {},
    "verify": {"w": None, "eps_ineq": None, "eps_supp": None},
    "capacity": {"subset": None, "region": None},
    "family": None,
}


class SolverConfig:
    """
    solver_config.json 의 기본 솔버/검증 설정.

    파일이 없거나 유효하지 않으면 기본 설정으로 되돌리고 파일을 다시 씁니다.
    """

    def __init__(self, config_file: Optional[Union[str, Path]] = None) -> None:
        self.config_file = Path(config_file) if config_file else get_app_root() / SOLVER_CONFIG_FILE
        self._solver: Dict[str, Any] = {}
        self._verifier: Dict[str, Any] = {}
        self.load_config()

    @property
    def options(self) -> SolverOptions:
        return SolverOptions.from_dict(self._solver)

    @property
    def eps_supp_rel(self) -> float:
        return float(self._verifier["eps_supp_rel"])

    @property
    def eps_ineq_rel(self) -> float:
        return float(self._verifier["eps_ineq_rel"])

    def _get_default_config(self) -> dict:
        """기본 설정을 반환합니다."""
        defaults = SolverOptions()
        return {
            "solver": {
                "max_iters": defaults.max_iters,
                "gap_tol": defaults.gap_tol,
                "algorithm": defaults.algorithm.value,
                "step_rule": defaults.step_rule.value,
                "pairwise_steps": defaults.pairwise_steps,
            },
            "verifier": {
                "eps_supp_rel": 1e-8,
                "eps_ineq_rel": 1e-6,
            },
        }

    def _validate_config(self, config: dict) -> bool:
        """설정 유효성을 검증합니다."""
        try:
            solver = config.get("solver", {})
            if not isinstance(solver, dict):
                logger.warning("solver 항목이 객체가 아닙니다")
                return False
            if "algorithm" in solver:
                Algorithm.parse(solver["algorithm"])
            if "step_rule" in solver:
                StepRule.parse(solver["step_rule"])
            max_iters = solver.get("max_iters", 1)
            if not isinstance(max_iters, int) or max_iters < 1:
                logger.warning(f"잘못된 max_iters: {max_iters}")
                return False
            gap_tol = solver.get("gap_tol", 1.0)
            if not isinstance(gap_tol, (int, float)) or gap_tol <= 0:
                logger.warning(f"잘못된 gap_tol: {gap_tol}")
                return False

            verifier = config.get("verifier", {})
            for key in ("eps_supp_rel", "eps_ineq_rel"):
                value = verifier.get(key, 1.0)
                if not isinstance(value, (int, float)) or value <= 0:
                    logger.warning(f"잘못된 {key}: {value}")
                    return False
            return True
        except InputError as e:
            logger.warning(f"설정 검증 오류: {e}")
            return False

    def load_config(self) -> None:
        """솔버 설정을 로드합니다."""
        default_config = self._get_default_config()

        if not self.config_file.exists():
            logger.info("설정 파일이 없어 기본 설정을 사용합니다.")
            self._apply_config(default_config)
            self.save_config()
            return

        try:
            with open(self.config_file, "r", encoding="utf-8") as f:
                config = json.load(f)

            if not isinstance(config, dict) or not self._validate_config(config):
                logger.warning("설정 파일이 유효하지 않아 기본 설정을 사용합니다.")
                self._apply_config(default_config)
                self.save_config()
                return

            # 누락된 설정은 기본값으로 보완
            for key, default_value in default_config.items():
                if key not in config:
                    config[key] = default_value
                elif isinstance(default_value, dict):
                    for sub_key, sub_default in default_value.items():
                        if sub_key not in config[key]:
                            config[key][sub_key] = sub_default

            self._apply_config(config)
            logger.info("설정 로드 완료")

        except (OSError, json.JSONDecodeError) as e:
            logger.exception("설정 로드 오류: %s", e)
            logger.info("기본 설정을 사용합니다.")
            self._apply_config(default_config)
            self.save_config()

    def _apply_config(self, config: dict) -> None:
        self._solver = dict(config.get("solver", {}))
        self._verifier = dict(config.get("verifier", {}))
        logger.debug(f"솔버 설정: {self._solver}, 검증 설정: {self._verifier}")

    def save_config(self) -> bool:
        """솔버 설정을 저장합니다."""
        try:
            config = {"solver": self._solver.copy(), "verifier": self._verifier.copy()}
            with open(self.config_file, "w", encoding="utf-8") as f:
                json.dump(config, f, ensure_ascii=False, indent=2)
            logger.info("설정 저장 완료")
            return True
        except OSError as e:
            logger.exception("설정 저장 오류: %s", e)
            return False


@dataclass(frozen=True)
class Scenario:
    """기본값이 채워진 시나리오 문서와 상대 경로의 기준 디렉토리"""

    data: Dict[str, Any]
    base_dir: Path

    @property
    def name(self) -> str:
        return str(self.data["name"])

    def block(self, key: str) -> Any:
        return self.data.get(key)

    def resolve_path(self, value: Union[str, Path]) -> Path:
        path = Path(value)
        if not path.is_absolute():
            path = self.base_dir / path
        if not path.exists():
            raise ScenarioError(f"referenced file does not exist: {path}")
        return path


def merge_defaults(data: Dict[str, Any]) -> Dict[str, Any]:
    """DEFAULT_SCENARIO 로 한 단계 깊이까지 누락된 값을 채움"""
    merged = copy.deepcopy(data)
    for key, default_value in DEFAULT_SCENARIO.items():
        if key not in merged:
            merged[key] = copy.deepcopy(default_value)
        elif isinstance(default_value, dict) and isinstance(merged[key], dict):
            for sub_key, sub_default in default_value.items():
                merged[key].setdefault(sub_key, copy.deepcopy(sub_default))
    return merged


def validate_scenario(data: Dict[str, Any]) -> None:
    """필수 블록과 형식을 검사합니다 (값의 범위는 각 모듈의 생성자가 검사)"""
    unknown = set(data) - set(DEFAULT_SCENARIO)
    if unknown:
        raise ScenarioError(f"unknown scenario keys: {sorted(unknown)}")
    kernel = data.get("kernel")
    if not isinstance(kernel, dict) or "kind" not in kernel:
        raise ScenarioError("scenario needs a kernel block with a 'kind'")
    if kernel["kind"] != "matrix" and not isinstance(data.get("geometry"), dict):
        raise ScenarioError("scenario needs a geometry block unless the kernel is an explicit matrix")
    if data.get("sigma") is not None and not isinstance(data["sigma"], dict):
        raise ScenarioError("scenario block 'sigma' must be an object")
    for key in ("g", "field", "solver", "verify", "capacity"):
        if not isinstance(data.get(key), dict):
            raise ScenarioError(f"scenario block '{key}' must be an object")
    family = data.get("family")
    if family is not None and (not isinstance(family, dict) or family.get("kind") not in ("decreasing", "exhaustion")):
        raise ScenarioError("family block needs kind 'decreasing' or 'exhaustion'")
    normalization = data.get("normalization")
    if not isinstance(normalization, (int, float)) or normalization <= 0:
        raise ScenarioError(f"normalization must be a positive number, got {normalization}")


def scenario_from_dict(data: Dict[str, Any], base_dir: Optional[Union[str, Path]] = None) -> Scenario:
    if not isinstance(data, dict):
        raise ScenarioError("scenario document must be a JSON object")
    merged = merge_defaults(data)
    validate_scenario(merged)
    return Scenario(merged, Path(base_dir) if base_dir else Path.cwd())


def load_scenario(path: Union[str, Path]) -> Scenario:
    """시나리오 JSON 파일을 읽어 검증합니다."""
    path = Path(path)
    if not path.exists():
        raise ScenarioError(f"scenario file not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ScenarioError(f"invalid JSON in {path}: {e}") from e
    scenario = scenario_from_dict(data, path.parent.resolve())
    logger.info(f"시나리오 로드: {scenario.name} ({path})")
    return scenario
