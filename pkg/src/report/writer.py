# -*- coding: utf-8 -*-
"""--out 디렉토리에 고정된 이름으로 결과 파일을 씁니다."""
import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Sequence, Union

import numpy as np
import pandas as pd

from src.convergence.family_run import FamilyRun
from src.energy.functional import weighted_potential
from src.energy.measure import DiscreteMeasure
from src.energy.problem import Problem
from src.geometry.point_cloud import PointCloud
from src.report.template import format_example_string, format_family_string, format_report_string
from src.solver.options import Solution
from src.utils import FLOAT_FORMAT, json_float
from src.verifier.capacity import CapacityCheck
from src.verifier.variational import VariationalReport

logger = logging.getLogger(__name__)

SOLUTION_JSON = "solution.json"
LAMBDA_CSV = "lambda.csv"
PROFILE_CSV = "profile.csv"
REPORT_JSON = "report.json"
REPORT_TXT = "report.txt"
FAMILY_CSV = "family.csv"
FAMILY_JSON = "family.json"
FAMILY_TXT = "family.txt"
CAPACITY_JSON = "capacity.json"
THETA_CSV = "theta.csv"
MATRIX_CSV = "matrix.csv"


def _out(out_dir: Union[str, Path], name: str) -> Path:
    path = Path(out_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path / name


def write_json(path: Path, data: Dict[str, Any]) -> Path:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, ensure_ascii=False, indent=2)
    logger.debug(f"JSON 저장: {path}")
    return path


def write_text(path: Path, text: str) -> Path:
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)
    return path


def profile_frame(problem: Problem, solution: Solution, cloud: Optional[PointCloud]) -> pd.DataFrame:
    """점 좌표, λ, σ, W, W/g 표"""
    W = weighted_potential(problem, solution.lam)
    frame = cloud.to_frame() if cloud is not None else pd.DataFrame(index=np.arange(problem.size))
    frame.insert(0, "index", np.arange(problem.size))
    frame["lambda"] = solution.weights
    frame["sigma"] = problem.sigma.weights
    frame["g"] = problem.g
    frame["W"] = W
    frame["W_over_g"] = W / problem.g
    return frame


def write_solution(out_dir: Union[str, Path], problem: Problem, solution: Solution,
                   cloud: Optional[PointCloud] = None) -> Path:
    """solution.json, lambda.csv, profile.csv"""
    write_json(_out(out_dir, SOLUTION_JSON), solution.to_dict())
    solution.lam.to_csv(_out(out_dir, LAMBDA_CSV))
    profile_frame(problem, solution, cloud).to_csv(
        _out(out_dir, PROFILE_CSV), index=False, float_format=FLOAT_FORMAT, encoding="utf-8"
    )
    logger.info(f"풀이 결과 저장: {Path(out_dir).resolve()}")
    return Path(out_dir)


def write_report(out_dir: Union[str, Path], report: VariationalReport,
                 solution: Optional[Solution] = None) -> Path:
    """report.json, report.txt"""
    write_json(_out(out_dir, REPORT_JSON), report.to_dict())
    write_text(_out(out_dir, REPORT_TXT), format_report_string(report, solution))
    return Path(out_dir)


def write_capacity(out_dir: Union[str, Path],
                   theta: DiscreteMeasure,
                   cap: float,
                   subset: Sequence[int],
                   check: Optional[CapacityCheck] = None) -> Path:
    """capacity.json (항등식 확인 결과 포함), theta.csv"""
    data = {
        "capacity": json_float(cap),
        "theta_mass": json_float(theta.total_mass),
        "subset_size": int(len(subset)),
        "subset": [int(i) for i in subset],
    }
    if check is not None:
        data.update({key: json_float(value) if isinstance(value, float) else value
                     for key, value in check.to_dict().items()})
    write_json(_out(out_dir, CAPACITY_JSON), data)
    theta.to_csv(_out(out_dir, THETA_CSV))
    return Path(out_dir)


def write_family(out_dir: Union[str, Path], run: FamilyRun) -> Path:
    """family.csv, family.json, family.txt"""
    run.to_frame().to_csv(_out(out_dir, FAMILY_CSV), index=False, float_format=FLOAT_FORMAT, encoding="utf-8")
    write_json(_out(out_dir, FAMILY_JSON), run.to_dict())
    write_text(_out(out_dir, FAMILY_TXT), format_family_string(run))
    return Path(out_dir)


def write_example(out_dir: Union[str, Path], result) -> Path:
    """내장 예제: 풀이, 검사 보고서, 구조적 주장"""
    write_solution(out_dir, result.problem, result.solution, result.cloud)
    data = result.report.to_dict()
    data["example"] = result.name
    data["checks"] = [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in result.checks]
    data["extras"] = {k: json_float(v) for k, v in result.extras.items()}
    data["example_passed"] = result.passed
    write_json(_out(out_dir, REPORT_JSON), data)
    write_text(_out(out_dir, REPORT_TXT), format_example_string(result))
    return Path(out_dir)


def write_matrix(out_dir: Union[str, Path], matrix) -> Path:
    """디버깅용 커널 행렬 덤프 (matrix.csv)"""
    path = _out(out_dir, MATRIX_CSV)
    matrix.to_csv(path)
    logger.info(f"커널 행렬 저장: {path}")
    return path
