import math
import sys
from pathlib import Path
from typing import Any, Union


def get_app_root() -> Path:
    """
    빌드된 환경과 일반 환경 모두에서
    애플리케이션의 루트 디렉토리(쓰기 가능한)를 반환합니다.
    """
    if getattr(sys, 'frozen', False) and hasattr(sys, '_MEIPASS'):
        return Path(sys.executable).parent
    else:
        return Path(__file__).parent.parent.resolve()

FLOAT_FORMAT = "%.17g"

def json_float(value: float) -> Union[float, str]:
    """JSON 출력용 실수. 무한대와 NaN은 문자열로 표현합니다."""
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return value

def parse_json_float(value: Any) -> float:
    """json_float의 역변환"""
    return float(value)
