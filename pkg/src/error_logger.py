import sys
import logging
import platform
import uuid
import json
from datetime import datetime
from typing import Optional, Dict, Any
from zoneinfo import ZoneInfo
from pathlib import Path


class KSTFormatter(logging.Formatter):
    """Asia/Seoul 타임존으로 로그 시간을 표시하는 포맷터"""

    def converter(self, timestamp: float):
        dt = datetime.fromtimestamp(timestamp, tz=ZoneInfo("Asia/Seoul"))
        return dt.timetuple()


class RunLogHandler(logging.Handler):
    """실행 로그를 JSON Lines 파일(run_log.jsonl)에 구조화해서 기록하는 핸들러"""

    def __init__(self, log_path: Path, run_id: Optional[str] = None, app_version: str = "1.0.0"):
        super().__init__()
        self.log_path = Path(log_path)
        self.log_path.parent.mkdir(parents=True, exist_ok=True)
        self.run_id = run_id or str(uuid.uuid4())[:8]
        self.app_version = app_version
        self.os_info = f"{platform.system()} {platform.release()}"
        self.problem_hash: Optional[str] = None
        self._stream = open(self.log_path, "a", encoding="utf-8")

    def emit(self, record: logging.LogRecord):
        """로그 레코드를 한 줄의 JSON 으로 기록"""
        try:
            self._stream.write(json.dumps(self._format_log_record(record), ensure_ascii=False) + "\n")
            self._stream.flush()
        except Exception:
            self.handleError(record)

    def close(self):
        try:
            if not self._stream.closed:
                self._stream.close()
        finally:
            super().close()

    def _format_log_record(self, record: logging.LogRecord) -> Dict[str, Any]:
        """로그 레코드를 JSON 형식으로 변환"""
        error_details = None
        if record.exc_info:
            error_details = self.format(record)

        created_at = datetime.fromtimestamp(record.created, tz=ZoneInfo("Asia/Seoul")).isoformat()

        return {
            "run_id": self.run_id,
            "log_level": record.levelname,
            "log_type": self._determine_log_type(record),
            "message": record.getMessage(),
            "error_details": error_details,
            "module_name": record.name,
            "function_name": record.funcName if record.funcName != '<module>' else None,
            "line_number": record.lineno,
            "app_version": self.app_version,
            "os_info": self.os_info,
            "problem_hash": getattr(record, "problem_hash", None) or self.problem_hash,
            "created_at": created_at,
        }

    def _determine_log_type(self, record: logging.LogRecord) -> str:
        """로그 레코드에서 로그 타입을 결정"""
        module_name = record.name.lower()

        if 'solver' in module_name or 'convergence' in module_name:
            return 'SOLVER'
        elif 'kernels' in module_name:
            return 'KERNEL'
        elif 'verifier' in module_name:
            return 'VERIFIER'
        elif 'geometry' in module_name:
            return 'GEOMETRY'
        elif 'scenario' in module_name or 'input' in module_name:
            return 'INPUT'
        elif record.levelname in ['ERROR', 'CRITICAL']:
            return 'ERROR'
        elif record.levelname == 'WARNING':
            return 'WARNING'
        else:
            return 'INFO'


class ErrorLogger:
    """프로젝트 전체의 에러 로깅을 관리하는 클래스"""

    def __init__(self, log_path: Path, run_id: str = None, app_version: str = "1.0.0"):
        self.run_handler = RunLogHandler(log_path, run_id, app_version)
        self._setup_logging()

    def _setup_logging(self):
        """루트 로거에 실행 로그 핸들러 추가"""
        root_logger = logging.getLogger()

        # 기존 실행 로그 핸들러가 있는지 확인하고 제거
        for handler in root_logger.handlers[:]:
            if isinstance(handler, RunLogHandler):
                root_logger.removeHandler(handler)
                handler.close()

        self.run_handler.setLevel(logging.INFO)
        root_logger.addHandler(self.run_handler)

        formatter = KSTFormatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
        self.run_handler.setFormatter(formatter)

    def set_problem_hash(self, problem_hash: Optional[str]):
        """이후 기록에 붙일 문제 지문"""
        self.run_handler.problem_hash = problem_hash

    def log_system_info(self):
        """실행 시작 시 기본 정보 로깅"""
        logger = logging.getLogger("system")
        logger.info(f"실행 시작 - 실행 ID: {self.run_handler.run_id}")
        logger.info(f"운영체제: {self.run_handler.os_info}")
        logger.info(f"Python 버전: {sys.version.split()[0]}")
        logger.info(f"애플리케이션 버전: {self.run_handler.app_version}")

    def log_error(self, error: Exception, context: str = "", extra_data: Dict[str, Any] = None):
        """예외를 포함한 상세 에러 로깅"""
        logger = logging.getLogger("error_logger")

        error_message = f"{context}: {str(error)}" if context else str(error)

        if extra_data:
            error_message += f" | 추가정보: {json.dumps(extra_data, ensure_ascii=False, default=str)}"

        logger.error(error_message, exc_info=error)

    def log_solver_error(self, error: Exception, iterations: int = None, gap: float = None):
        """솔버 실패 전용 로깅"""
        self.log_error(error, "솔버 오류", {"iterations": iterations, "gap": gap})

    def log_input_error(self, error: Exception, source: str = None):
        """입력(시나리오, 점 구름, 커널) 오류 전용 로깅"""
        context = "입력 오류"
        if source:
            context += f" - {source}"
        self.log_error(error, context, {"source": source})

    def log_verification_failure(self, name: str, detail: str):
        """검증 실패 (예외가 아닌 판정 결과) 로깅"""
        logging.getLogger("verification").warning(f"검증 실패 [{name}]: {detail}")

    def shutdown(self):
        """에러 로거 안전 종료"""
        root_logger = logging.getLogger()
        if self.run_handler in root_logger.handlers:
            root_logger.removeHandler(self.run_handler)
        self.run_handler.close()


# 글로벌 에러 로거 인스턴스
_global_error_logger: Optional[ErrorLogger] = None


def initialize_error_logger(log_path: Path, run_id: str = None, app_version: str = "1.0.0") -> ErrorLogger:
    """글로벌 에러 로거 초기화"""
    global _global_error_logger
    if _global_error_logger:
        _global_error_logger.shutdown()
    _global_error_logger = ErrorLogger(log_path, run_id, app_version)
    return _global_error_logger


def get_error_logger() -> Optional[ErrorLogger]:
    """글로벌 에러 로거 인스턴스 반환"""
    return _global_error_logger


def shutdown_error_logger():
    """글로벌 에러 로거 안전 종료"""
    global _global_error_logger
    if _global_error_logger:
        _global_error_logger.shutdown()
        _global_error_logger = None


def log_exception(error: Exception, context: str = "", **kwargs):
    """간편한 예외 로깅 함수"""
    if _global_error_logger:
        _global_error_logger.log_error(error, context, kwargs)
    else:
        # 백업용 로깅
        logging.getLogger("error").error(f"{context}: {error}", exc_info=error)
