# -*- coding: utf-8 -*-
"""솔버 옵션과 결과."""
import logging
from dataclasses import asdict, dataclass, fields, replace
from enum import Enum
from typing import Any, Dict, Optional

import numpy as np

from src.energy.measure import DiscreteMeasure
from src.errors import InputError
from src.arrays import json_array
from src.utils import json_float, parse_json_float

logger = logging.getLogger(__name__)


class Algorithm(str, Enum):
    CONDITIONAL_GRADIENT = "conditional_gradient"
    PROJECTED_GRADIENT = "projected_gradient"

    @classmethod
    def parse(cls, value: Any) -> "Algorithm":
        """`cg` / `pg` 약칭도 허용"""
        if isinstance(value, cls):
            return value
        aliases = {"cg": cls.CONDITIONAL_GRADIENT, "pg": cls.PROJECTED_GRADIENT}
        key = str(value).strip().lower()
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError as e:
            raise InputError(f"unknown algorithm: {value}") from e


class StepRule(str, Enum):
    EXACT_LINE_SEARCH = "exact_line_search"
    FIXED_DECAY = "fixed_decay"

    @classmethod
    def parse(cls, value: Any) -> "StepRule":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError as e:
            raise InputError(f"unknown step rule: {value}") from e


@dataclass(frozen=True)
class SolverOptions:
    """
    반복 솔버 설정.

    pairwise_steps 는 조건부 경사 반복마다 수행하는 쌍별 질량 이동 횟수,
    refresh_every 는 점진적으로 갱신한 퍼텐셜을 다시 계산하는 주기입니다.
    """

    max_iters: int = 100000
    gap_tol: float = 1e-9
    step_rule: StepRule = StepRule.EXACT_LINE_SEARCH
    algorithm: Algorithm = Algorithm.CONDITIONAL_GRADIENT
    pairwise_steps: int = 8
    refresh_every: int = 50
    log_every: int = 1000
    debug: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "step_rule", StepRule.parse(self.step_rule))
        object.__setattr__(self, "algorithm", Algorithm.parse(self.algorithm))
        if int(self.max_iters) < 1:
            raise InputError(f"max_iters must be >= 1, got {self.max_iters}")
        if not float(self.gap_tol) > 0:
            raise InputError(f"gap_tol must be positive, got {self.gap_tol}")
        if int(self.pairwise_steps) < 0:
            raise InputError(f"pairwise_steps must be >= 0, got {self.pairwise_steps}")
        if int(self.refresh_every) < 1 or int(self.log_every) < 1:
            raise InputError("refresh_every and log_every must be >= 1")
        object.__setattr__(self, "max_iters", int(self.max_iters))
        object.__setattr__(self, "gap_tol", float(self.gap_tol))
        object.__setattr__(self, "pairwise_steps", int(self.pairwise_steps))

    def with_overrides(self, **overrides: Any) -> "SolverOptions":
        """None 이 아닌 값만 덮어씁니다 (CLI 플래그용)"""
        unknown = set(overrides) - {f.name for f in fields(self)}
        if unknown:
            raise InputError(f"unknown solver options: {sorted(unknown)}")
        changes = {k: v for k, v in overrides.items() if v is not None}
        return replace(self, **changes) if changes else self

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["step_rule"] = self.step_rule.value
        data["algorithm"] = self.algorithm.value
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SolverOptions":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            logger.warning(f"알 수 없는 솔버 옵션 무시: {sorted(unknown)}")
        return cls(**{k: v for k, v in data.items() if k in known})


@dataclass(frozen=True, eq=False)
class Solution:
    """평형 측도 λ 와 최적성 증명서"""

    lam: DiscreteMeasure
    value: float
    gap: float
    iterations: int
    ell: float
    L: float
    converged: bool
    options: Optional[SolverOptions] = None
    problem_hash: Optional[str] = None

    @property
    def weights(self) -> np.ndarray:
        return self.lam.weights

    def to_dict(self) -> Dict[str, Any]:
        return {
            "lambda": json_array(self.lam.weights),
            "value": json_float(self.value),
            "gap": json_float(self.gap),
            "iterations": int(self.iterations),
            "ell": json_float(self.ell),
            "L": json_float(self.L),
            "converged": bool(self.converged),
            "provenance": {
                "options": self.options.to_dict() if self.options is not None else None,
                "problem_hash": self.problem_hash,
            },
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Solution":
        provenance = data.get("provenance") or {}
        options = provenance.get("options")
        return cls(
            lam=DiscreteMeasure([parse_json_float(v) for v in data["lambda"]]),
            value=parse_json_float(data["value"]),
            gap=parse_json_float(data["gap"]),
            iterations=int(data["iterations"]),
            ell=parse_json_float(data["ell"]),
            L=parse_json_float(data["L"]),
            converged=bool(data["converged"]),
            options=SolverOptions.from_dict(options) if options else None,
            problem_hash=provenance.get("problem_hash"),
        )
