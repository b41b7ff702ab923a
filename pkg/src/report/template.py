# -*- coding: utf-8 -*-
"""사람이 읽는 텍스트 보고서."""
from datetime import datetime, timezone
from typing import List, Optional
from zoneinfo import ZoneInfo

from src.convergence.family_run import FamilyRun
from src.solver.options import Solution
from src.verifier.variational import VariationalReport

KST = ZoneInfo("Asia/Seoul")
RULE = "-" * 48


def format_timestamp(moment: Optional[datetime] = None) -> str:
    """KST YYYY-MM-DD HH:mm:ss 형식"""
    moment = moment or datetime.now(timezone.utc)
    return moment.astimezone(KST).strftime("%Y-%m-%d %H:%M:%S")


def _fmt(value: float) -> str:
    return f"{value:.12g}"


def format_solution_lines(solution: Solution) -> List[str]:
    lines = [
        f"G_f(λ)      : {_fmt(solution.value)}",
        f"gap         : {solution.gap:.3e}",
        f"반복 횟수   : {solution.iterations}",
        f"수렴        : {'예' if solution.converged else '아니오'}",
    ]
    if solution.options is not None:
        lines.append(f"알고리즘    : {solution.options.algorithm.value} ({solution.options.step_rule.value})")
    return lines


def format_report_string(report: VariationalReport,
                         solution: Optional[Solution] = None,
                         title: str = "변분 부등식 검사",
                         top: int = 10) -> str:
    """
    검사 보고서 문자열을 만듭니다.

    Args:
        report: 검사 결과
        solution: 함께 보여 줄 풀이 결과
        title: 제목
        top: 보여 줄 최악 여유값 개수

    Returns:
        str: ℓ, L, w 구간과 가장 나쁜 여유값 목록
    """
    lines = [f"*** {title} ***", f"작성 시각: {format_timestamp()}", ""]
    if solution is not None:
        lines.extend(format_solution_lines(solution))
        lines.append("")
    lines.append(RULE)
    lines.append(f"ℓ           : {_fmt(report.ell)}")
    lines.append(f"L           : {_fmt(report.L)}")
    lines.append(f"w 구간      : [{_fmt(report.ell)}, {_fmt(report.L)}]")
    lines.append(f"검사한 w    : {_fmt(report.w)}")
    lines.append(f"eps_supp    : {report.eps_supp:.3e}")
    lines.append(f"eps_ineq    : {report.eps_ineq:.3e}")
    lines.append(RULE)
    worst = report.worst(top)
    if worst:
        lines.append(f"가장 나쁜 여유값 (상위 {len(worst)}개)")
        for kind, index, margin in worst:
            lines.append(f"  {kind}  #{index:<6d} {margin:.6e}")
    else:
        lines.append("위배 없음")
    lines.append(RULE)
    lines.append(f"결과: {'통과' if report.passed else '실패'}")
    return "\n".join(lines) + "\n"


def format_family_string(run: FamilyRun) -> str:
    lines = [f"*** 족 수렴 검사 ({run.kind}) ***", f"작성 시각: {format_timestamp()}", ""]
    lines.append(f"극한 값 G   : {_fmt(run.limit_value)}")
    lines.append(RULE)
    lines.append(f"{'단계':>4} {'크기':>6} {'G':>22} {'gap':>10} {'거리':>10}")
    for stage, distance in zip(run.stages, run.distances):
        if stage.skipped:
            lines.append(f"{stage.stage:>4} {stage.size:>6} {'(건너뜀)':>22}")
            continue
        lines.append(f"{stage.stage:>4} {stage.size:>6} {stage.value:>22.15g} {stage.gap:>10.2e} {distance:>10.2e}")
    lines.append(RULE)
    lines.append(f"단조성      : {'예' if run.monotone else '아니오'}")
    lines.append(f"거리 단조성 : {'예' if run.distances_monotone else '아니오'}")
    if run.convex_bound_ok is not None:
        lines.append(f"볼록 부등식 : {'성립' if run.convex_bound_ok else '위배'}")
    lines.append(f"마지막 단계 : {'허용 오차 안' if run.final_within_tol else '허용 오차 밖'}")
    for note in run.notes:
        lines.append(f"  - {note}")
    lines.append(f"결과: {'통과' if run.passed else '실패'}")
    return "\n".join(lines) + "\n"


def format_example_string(result) -> str:
    """내장 예제 결과 (ExampleResult)"""
    body = format_report_string(result.report, result.solution, title=f"{result.name} 재현")
    lines = [body.rstrip("\n"), "", "구조적 주장"]
    for check in result.checks:
        lines.append(f"  [{'통과' if check.passed else '실패'}] {check.name}: {check.detail}")
    for key, value in result.extras.items():
        lines.append(f"  {key} = {_fmt(value)}")
    lines.append(f"최종 결과: {'통과' if result.passed else '실패'}")
    return "\n".join(lines) + "\n"
