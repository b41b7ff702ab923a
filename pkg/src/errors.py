"""평형 측도 계산기 전체에서 사용하는 예외 계층."""
from typing import Optional


class EquilibriumError(Exception):
    """모든 도메인 예외의 최상위 클래스"""

    exit_code = 1


# --- 입력 오류 (exit 1) ------------------------------------------------
class InputError(EquilibriumError, ValueError):
    """잘못된 입력"""

    exit_code = 1


class GeometryError(InputError):
    """점 구름 구성 오류"""


class DuplicatePointError(GeometryError):
    """중복된 점 (커널 행렬의 비대각 성분이 무한대가 됨)"""


class KernelError(InputError):
    """커널 정의 또는 조립 오류"""


class InadmissiblePointError(KernelError):
    """커널의 허용 영역 밖에 있는 점"""


class NotPositiveDefiniteError(KernelError):
    """양의 정부호 검사 실패"""

    def __init__(self, message: str, min_pivot: Optional[float] = None) -> None:
        super().__init__(message)
        self.min_pivot = min_pivot


class MeasureError(InputError):
    """측도 또는 외부장 데이터 오류"""


class InfeasibleProblemError(InputError):
    """허용 집합 E^σ(Σ,g)가 비어 있음"""


class ScenarioError(InputError):
    """시나리오 파일 오류"""


# --- 솔버 오류 (exit 2) ------------------------------------------------
class SolverError(EquilibriumError):
    """솔버 실패"""

    exit_code = 2


class NonConvergenceError(SolverError):
    """max_iters 안에 certificate gap이 gap_tol 이하로 내려가지 않음"""


class DescentViolationError(SolverError):
    """정확한 선탐색에서 목적함수가 증가함 (debug 모드)"""


# --- 검증 오류 (exit 3) ------------------------------------------------
class VerificationError(EquilibriumError):
    """변분 부등식 또는 예제의 구조적 주장이 성립하지 않음"""

    exit_code = 3


def exit_code_for(error: BaseException) -> int:
    """예외를 CLI 종료 코드로 변환"""
    if isinstance(error, EquilibriumError):
        return error.exit_code
    return 1
