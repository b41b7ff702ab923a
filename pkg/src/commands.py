# -*- coding: utf-8 -*-
"""CLI 명령: solve, verify, capacity, converge, example."""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

from src.convergence.family_run import run_compact_exhaustion, run_decreasing_family
from src.energy.functional import weighted_potential
from src.error_logger import get_error_logger
from src.errors import (EquilibriumError, InputError, NonConvergenceError, ScenarioError, SolverError,
                        VerificationError, exit_code_for)
from src.report.writer import (write_capacity, write_example, write_family, write_matrix, write_report,
                               write_solution)
from src.scenario.builder import (BuiltScenario, build_cloud, build_family, build_matrix, build_options,
                                  build_scenario, capacity_subset)
from src.scenario.builtin import run_example
from src.scenario.config import Scenario, SolverConfig, load_scenario
from src.solver.engine import solve
from src.solver.options import SolverOptions, Solution
from src.verifier.capacity import CAPACITY_OPTIONS, capacitary_distribution, check_capacity
from src.verifier.variational import check_variational, potential_scale, sigma_scale

logger = logging.getLogger(__name__)

EXIT_OK = 0


@dataclass
class CommandContext:
    """명령 공통 설정 (CLI 플래그가 시나리오 값을 덮어씀)"""

    out_dir: Path
    config: SolverConfig
    gap_tol: Optional[float] = None
    algorithm: Optional[str] = None
    w: Optional[float] = None
    dump_matrix: bool = False

    def options(self, scenario: Optional[Scenario] = None) -> SolverOptions:
        opts = self.config.options
        if scenario is not None:
            opts = build_options(scenario, opts)
        return opts.with_overrides(gap_tol=self.gap_tol, algorithm=self.algorithm)


def _solve_built(built: BuiltScenario, ctx: CommandContext) -> Solution:
    error_logger = get_error_logger()
    if error_logger:
        error_logger.set_problem_hash(built.problem.fingerprint())
    if ctx.dump_matrix:
        write_matrix(ctx.out_dir, built.matrix)
    return solve(built.problem, ctx.options(built.scenario))


def _require_converged(solution: Solution) -> None:
    if not solution.converged:
        raise NonConvergenceError(
            f"solver stopped after {solution.iterations} iterations with gap {solution.gap:.3e}"
        )


def cmd_solve(scenario: Scenario, ctx: CommandContext) -> int:
    """평형 측도를 풀어 solution.json, lambda.csv, profile.csv 를 씁니다."""
    built = build_scenario(scenario)
    solution = _solve_built(built, ctx)
    write_solution(ctx.out_dir, built.problem, solution, built.cloud)
    _require_converged(solution)
    return EXIT_OK


def cmd_verify(scenario: Scenario, ctx: CommandContext) -> int:
    """풀이 뒤 변분 부등식 보고서까지 씁니다. 검사 실패 시 종료 코드 3"""
    built = build_scenario(scenario)
    solution = _solve_built(built, ctx)
    write_solution(ctx.out_dir, built.problem, solution, built.cloud)
    _require_converged(solution)

    verify = scenario.block("verify")
    problem = built.problem
    eps_supp = verify.get("eps_supp")
    if eps_supp is None:
        eps_supp = ctx.config.eps_supp_rel * sigma_scale(problem)
    eps_ineq = verify.get("eps_ineq")
    if eps_ineq is None:
        eps_ineq = ctx.config.eps_ineq_rel * potential_scale(weighted_potential(problem, solution.lam))
    w = ctx.w if ctx.w is not None else verify.get("w")
    report = check_variational(problem, solution.lam, w, eps_ineq, eps_supp)
    write_report(ctx.out_dir, report, solution)
    if not report.passed:
        detail = f"{len(report.ineq1_violations)} ineq1 / {len(report.ineq2_violations)} ineq2 violations at w={report.w:.12g}"
        error_logger = get_error_logger()
        if error_logger:
            error_logger.log_verification_failure("variational", detail)
        raise VerificationError(detail)
    return EXIT_OK


def cmd_capacity(scenario: Scenario, ctx: CommandContext) -> int:
    """용량 분포 θ 와 C 를 씁니다."""
    cloud = build_cloud(scenario)
    matrix = build_matrix(scenario, cloud)
    subset = capacity_subset(scenario, cloud, matrix.size)
    opts = ctx.options(scenario)
    opts = opts.with_overrides(gap_tol=min(opts.gap_tol, CAPACITY_OPTIONS.gap_tol))
    theta, cap = capacitary_distribution(matrix, subset, opts)
    check = check_capacity(matrix, theta, subset)
    write_capacity(ctx.out_dir, theta, cap, subset, check)
    if not check.ok:
        detail = (f"capacity identities fail: relative error {check.identity_error:.3e}, "
                  f"min potential {check.min_potential:.12g}")
        error_logger = get_error_logger()
        if error_logger:
            error_logger.log_verification_failure("capacity", detail)
        raise VerificationError(detail)
    return EXIT_OK


def cmd_converge(scenario: Scenario, ctx: CommandContext) -> int:
    """family 블록을 따라 단계별로 풀고 family.csv 를 씁니다."""
    built = build_scenario(scenario)
    opts = ctx.options(scenario)
    kind, family, schedule = build_family(built)
    if kind == "decreasing":
        run = run_decreasing_family(built.problem, family, schedule, opts)
    else:
        run = run_compact_exhaustion(built.problem, family, schedule, opts)
    write_family(ctx.out_dir, run)
    if not run.passed:
        detail = "; ".join(run.notes) or "final stage outside tolerance"
        error_logger = get_error_logger()
        if error_logger:
            error_logger.log_verification_failure(f"family:{kind}", detail)
        raise VerificationError(detail)
    return EXIT_OK


def cmd_example(name: str, ctx: CommandContext) -> int:
    """내장 예제를 실행하고 구조적 주장을 확인합니다."""
    result = run_example(name, ctx.options())
    write_example(ctx.out_dir, result)
    if not result.passed:
        failed = [c.name for c in result.checks if not c.passed]
        if not result.report.passed:
            failed.append("variational")
        error_logger = get_error_logger()
        if error_logger:
            for check in result.checks:
                if not check.passed:
                    error_logger.log_verification_failure(check.name, check.detail)
        raise VerificationError(f"{name}: failed checks {failed}")
    return EXIT_OK


def cmd_scenario(command: str, path: Path, ctx: CommandContext) -> int:
    """시나리오 파일을 읽어 solve, verify, capacity, converge 중 하나를 실행합니다."""
    handlers = {
        "solve": cmd_solve,
        "verify": cmd_verify,
        "capacity": cmd_capacity,
        "converge": cmd_converge,
    }
    if command not in handlers:
        raise ScenarioError(f"unknown command: {command}")
    return handlers[command](load_scenario(path), ctx)


def run_command(func: Callable[..., int], *args) -> int:
    """명령을 실행하고 예외를 종료 코드로 바꿉니다."""
    error_logger = get_error_logger()
    try:
        return func(*args)
    except InputError as e:
        logger.error(f"입력 오류: {e}")
        if error_logger:
            error_logger.log_input_error(e, func.__name__)
        return exit_code_for(e)
    except SolverError as e:
        logger.error(f"솔버 오류: {e}")
        if error_logger:
            error_logger.log_solver_error(e)
        return exit_code_for(e)
    except VerificationError as e:
        logger.error(f"검증 실패: {e}")
        return exit_code_for(e)
    except EquilibriumError as e:
        logger.error(f"오류: {e}")
        return exit_code_for(e)
    except OSError as e:
        logger.error(f"파일 입출력 오류: {e}")
        if error_logger:
            error_logger.log_error(e, "파일 입출력 오류")
        return 1
