import sys
import os
import logging
import traceback
import time
import argparse
import signal
import json
from datetime import datetime
from pathlib import Path

from dotenv import load_dotenv
from src.error_logger import KSTFormatter, initialize_error_logger, log_exception, shutdown_error_logger
from src.utils import get_app_root

COMMANDS = ("solve", "verify", "capacity", "converge", "example")
THREAD_VARIABLES = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS")


def setup_logging(out_dir: Path, verbose: bool = False):
    # 로깅 설정 (출력 디렉토리 아래, APP_LOG_PATH 로 변경 가능)
    log_filename = os.getenv("APP_LOG_PATH", "equilibrium.log")
    log_path = Path(log_filename)
    if not log_path.is_absolute():
        log_path = out_dir / log_path
    log_path.parent.mkdir(parents=True, exist_ok=True)
    os.environ["TZ"] = "Asia/Seoul"
    try:
        time.tzset()
    except AttributeError:
        pass

    formatter = KSTFormatter('%(asctime)s - %(levelname)s - %(message)s')

    stream_handler = logging.StreamHandler()
    stream_handler.setLevel(logging.DEBUG if verbose else logging.INFO)
    file_handler = logging.FileHandler(log_path, encoding='utf-8')
    handlers = [stream_handler, file_handler]
    for h in handlers:
        h.setFormatter(formatter)

    logging.basicConfig(level=logging.DEBUG, handlers=handlers, force=True)
    return log_path


def apply_thread_limit():
    """EQUILIB_THREADS 로 BLAS/OpenMP 스레드 수를 제한합니다 (numpy 로드 전에 호출)"""
    threads = os.getenv("EQUILIB_THREADS")
    if not threads:
        return None
    if not threads.isdigit() or int(threads) < 1:
        logging.warning(f"잘못된 EQUILIB_THREADS 값은 무시합니다: {threads}")
        return None
    for name in THREAD_VARIABLES:
        os.environ[name] = threads
    return int(threads)


def get_current_version():
    """현재 버전을 가져옵니다."""
    try:
        version_file = Path(__file__).resolve().parent / "version.json"
        if version_file.exists():
            with open(version_file, 'r', encoding='utf-8-sig') as f:
                version_info = json.load(f)
                return version_info.get('version', '1.0.0')
    except (OSError, json.JSONDecodeError):
        # 오류 발생 시 기본 버전 반환
        pass
    return '1.0.0'


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="equilibrium",
        description="제약 조건이 있는 f-가중 최소 에너지 문제 풀이 및 검증 도구",
    )
    parser.add_argument("command", choices=COMMANDS, help="실행할 명령")
    parser.add_argument("name", nargs="?", help="example 명령의 예제 이름 (example1, example2)")
    parser.add_argument("--scenario", type=Path, help="시나리오 JSON 파일")
    parser.add_argument("--out", type=Path, required=True, help="출력 디렉토리")
    parser.add_argument("--gap-tol", type=float, dest="gap_tol", help="certificate gap 종료 기준 (절대값)")
    parser.add_argument("--algorithm", choices=("cg", "pg"), help="cg = conditional gradient, pg = projected gradient")
    parser.add_argument("--w", type=float, help="변분 부등식 검사에 쓸 w (기본: [ℓ, L] 의 중점)")
    parser.add_argument("--dump-matrix", action="store_true", dest="dump_matrix", help="커널 행렬을 matrix.csv 로 저장")
    parser.add_argument("--config", type=Path, help="solver_config.json 경로")
    parser.add_argument("--verbose", action="store_true", help="콘솔에 DEBUG 로그 출력")
    return parser


def cleanup_on_exit():
    """프로그램 종료 시 정리 작업"""
    logging.info("프로그램 종료 중 - 정리 작업 수행 중...")
    shutdown_error_logger()


def signal_handler(signum, frame):
    """시그널 핸들러"""
    logging.info(f"시그널 {signum} 수신됨 - 프로그램 종료")
    cleanup_on_exit()
    sys.exit(130)


def write_crash_log(out_dir: Path, error: Exception):
    """예상하지 못한 오류를 출력 디렉토리에 남깁니다."""
    try:
        error_time = datetime.now().strftime("%Y-%m-%d_%H-%M-%S")
        crash_log_path = out_dir / f"crash_{error_time}.log"
        error_details = f"""
An unexpected error stopped the run.

Time: {error_time}
Error: {str(error)}

------------------- TRACEBACK -------------------
{traceback.format_exc()}
-------------------------------------------------
"""
        with open(crash_log_path, 'w', encoding='utf-8') as f:
            f.write(error_details)
    except OSError:
        # 크래시 로그를 쓰는 것조차 실패하면 어쩔 수 없습니다.
        pass


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "example" and not args.name:
        print("example 명령에는 예제 이름이 필요합니다 (example1, example2)", file=sys.stderr)
        return 1
    if args.command != "example" and args.scenario is None:
        print(f"{args.command} 명령에는 --scenario 가 필요합니다", file=sys.stderr)
        return 1

    # .env 파일 로드 (애플리케이션 루트의 default.env, 선택 사항)
    dotenv_path = get_app_root() / "default.env"
    if dotenv_path.exists():
        load_dotenv(dotenv_path=dotenv_path)
    threads = apply_thread_limit()

    out_dir = args.out
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        print(f"출력 디렉토리를 만들 수 없습니다: {out_dir} ({e})", file=sys.stderr)
        return 1
    log_path = setup_logging(out_dir, args.verbose)

    if argv is None:
        try:
            signal.signal(signal.SIGINT, signal_handler)
            signal.signal(signal.SIGTERM, signal_handler)
        except (AttributeError, ValueError):
            # 지원하지 않는 시그널 또는 메인 스레드가 아닌 경우 무시
            pass

    version = get_current_version()
    error_logger = initialize_error_logger(out_dir / "run_log.jsonl", app_version=version)
    error_logger.log_system_info()
    logging.info(f"명령: {args.command}, 출력 디렉토리: {out_dir.resolve()}")
    logging.info(f"로그 파일 위치: {log_path}")
    if threads:
        logging.info(f"스레드 수 제한: {threads}")

    try:
        # 수치 모듈은 스레드 제한을 적용한 뒤에 로드
        from src.commands import CommandContext, cmd_example, cmd_scenario, run_command
        from src.errors import EquilibriumError, exit_code_for
        from src.scenario.config import SolverConfig

        try:
            config = SolverConfig(args.config)
        except EquilibriumError as e:
            logging.error(f"설정 오류: {e}")
            return exit_code_for(e)
        ctx = CommandContext(
            out_dir=out_dir,
            config=config,
            gap_tol=args.gap_tol,
            algorithm=args.algorithm,
            w=args.w,
            dump_matrix=args.dump_matrix,
        )

        if args.command == "example":
            exit_code = run_command(cmd_example, args.name, ctx)
        else:
            exit_code = run_command(cmd_scenario, args.command, args.scenario, ctx)

        if exit_code == 0:
            logging.info("명령이 성공적으로 완료되었습니다.")
        else:
            logging.warning(f"명령이 종료 코드 {exit_code} 로 끝났습니다.")
        return exit_code

    except Exception as e:
        # 명령 처리에서 잡히지 않은 모든 예외의 마지막 처리 지점
        logging.error(f"예상하지 못한 오류 발생: {e}", exc_info=True)
        log_exception(e, "main")
        write_crash_log(out_dir, e)
        return 1
    finally:
        cleanup_on_exit()


if __name__ == "__main__":
    sys.exit(main())
