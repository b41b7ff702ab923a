"""numpy 배열의 JSON 변환과 지문"""
import hashlib

import numpy as np

from src.utils import json_float


def json_array(values: np.ndarray) -> list:
    """배열을 JSON 리스트로 변환 (무한대 허용)"""
    return [json_float(v) for v in np.asarray(values, dtype=float).ravel()]


def array_digest(*arrays: np.ndarray) -> str:
    """배열들의 SHA-256 지문 (provenance 기록용)"""
    digest = hashlib.sha256()
    for array in arrays:
        data = np.ascontiguousarray(np.asarray(array, dtype=float))
        digest.update(str(data.shape).encode("utf-8"))
        digest.update(data.tobytes())
    return digest.hexdigest()
