"""공용 pytest 픽스처: 작은 예제 문제, 무작위 문제 생성기, 활성 집합 전수 조사 오라클"""
import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import pytest

from src.energy.field import CaseI, CaseII
from src.energy.measure import DiscreteMeasure
from src.energy.problem import Problem, build_problem
from src.kernels.matrix import KernelMatrix
from src.solver.options import SolverOptions
from src.solver.oracle import lp_oracle

TIGHT = SolverOptions(gap_tol=1e-13)


@pytest.fixture
def tight_options() -> SolverOptions:
    return TIGHT


@pytest.fixture
def symmetric_pair() -> Problem:
    """M=[[2,1],[1,2]], g=(1,1), f=0, σ=(1,1): 해는 (0.5, 0.5), G=1.5"""
    return build_problem(KernelMatrix.synthetic([[2.0, 1.0], [1.0, 2.0]]), DiscreteMeasure([1.0, 1.0]))


@pytest.fixture
def cheap_point() -> Problem:
    """M=[[1,0],[0,4]], f=(0,10): 모든 질량이 0번 점에"""
    return build_problem(
        KernelMatrix.synthetic([[1.0, 0.0], [0.0, 4.0]]),
        DiscreteMeasure([1.0, 1.0]),
        field=CaseI([0.0, 10.0]),
    )


def random_pd_matrix(rng: np.random.Generator, n: int) -> KernelMatrix:
    """A^T A + I"""
    a = rng.normal(size=(n, n))
    entries = a.T @ a + np.eye(n)
    return KernelMatrix.synthetic(0.5 * (entries + entries.T))


def random_problem(seed: int,
                   n: Optional[int] = None,
                   case_two: bool = False,
                   slack: float = 1.5) -> Problem:
    """
    무작위 문제: N ∈ {2..8}, g ∈ [0.5, 2], 유한한 f ∈ [-1, 1].

    σ 는 Σ g·σ = slack (> 1) 이 되도록 맞춥니다.
    """
    rng = np.random.default_rng(seed)
    n = n or int(rng.integers(2, 9))
    matrix = random_pd_matrix(rng, n)
    g = rng.uniform(0.5, 2.0, size=n)
    sigma = rng.uniform(0.2, 1.0, size=n)
    sigma *= slack / float(g @ sigma)
    if case_two:
        field = CaseII(DiscreteMeasure(rng.uniform(0.0, 0.5, size=n)),
                       DiscreteMeasure(rng.uniform(0.0, 0.5, size=n)))
    else:
        field = CaseI(rng.uniform(-1.0, 1.0, size=n))
    return build_problem(matrix, DiscreteMeasure(sigma), g, field)


@pytest.fixture
def make_random_problem():
    return random_problem


def random_feasible(problem: Problem, rng: np.random.Generator) -> DiscreteMeasure:
    """무작위 비용의 선형 오라클 꼭짓점을 섞은 허용 측도"""
    vertices = [lp_oracle(rng.normal(size=problem.size), problem).weights for _ in range(3)]
    mix = rng.dirichlet(np.ones(len(vertices)))
    return DiscreteMeasure(sum(w * v for w, v in zip(mix, vertices)))


@dataclass(frozen=True)
class BruteForceResult:
    weights: np.ndarray
    value: float


def brute_force_minimum(problem: Problem, tol: float = 1e-10) -> BruteForceResult:
    """
    모든 활성 집합 (0, 상한, 자유) 을 나열해 KKT 연립방정식을 풀고 허용 후보 중 최소를 고릅니다.

    볼록 이차계획이므로 최적점의 활성 집합이 반드시 후보에 포함됩니다.
    """
    m = problem.matrix.entries
    g = problem.g
    f = np.where(problem.finite_mask, problem.f, 0.0)
    sigma = problem.effective_sigma
    c = problem.normalization
    n = problem.size
    best = BruteForceResult(np.full(n, math.nan), math.inf)
    for labels in itertools.product((0, 1, 2), repeat=n):
        labels = np.array(labels)
        upper = labels == 1
        free = labels == 2
        x = np.where(upper, sigma, 0.0)
        remaining = c - float(g[upper] @ sigma[upper])
        if free.any():
            idx = np.flatnonzero(free)
            k = idx.size
            system = np.zeros((k + 1, k + 1))
            system[:k, :k] = 2.0 * m[np.ix_(idx, idx)]
            system[:k, k] = -g[idx]
            system[k, :k] = g[idx]
            rhs = np.concatenate([-2.0 * (m[idx] @ x + f[idx]), [remaining]])
            try:
                solution = np.linalg.solve(system, rhs)
            except np.linalg.LinAlgError:
                continue
            x[idx] = solution[:k]
        elif abs(remaining) > tol:
            continue
        if np.any(x < -tol) or np.any(x > sigma + tol):
            continue
        x = np.clip(x, 0.0, sigma)
        value = float(x @ m @ x + 2.0 * f @ x)
        if value < best.value:
            best = BruteForceResult(x, value)
    return best


@pytest.fixture
def brute_force():
    return brute_force_minimum
