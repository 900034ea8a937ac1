"""
CLBPFACE - L1 Solver

Rozwiązuje problem l1 w postaci z karą (lasso):

    min_a  (1/2) ||A a - y||_2^2 + lam * ||a||_1

metodą przyspieszonego gradientu proksymalnego (FISTA, krok 1/L, L = największa
wartość własna A^T A z metody potęgowej) z restartem momentu przy wzroście
funkcji celu. Ograniczenie równościowe A a = y jest zastąpione karą - dla
rzeczywistych danych (szum, m > n) jest zwykle niespełnialne.

Cykliczny coordinate descent jest tu wyłącznie wyrocznią do testów.

Użycie:
    from services.l1_solver import SolverParams, solve_l1

    solution = solve_l1(A, y, SolverParams(lam=0.01))
    print(solution.iterations, solution.final_objective)
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from utils.constants import DEFAULT_LAMBDA, DEFAULT_MAX_ITER, DEFAULT_TOL, POWER_ITERATIONS

logger = logging.getLogger(__name__)


class SolverInputError(ValueError):
    """Niepoprawne dane wejściowe solvera (NaN/inf, złe wymiary)."""


@dataclass(frozen=True)
class SolverParams:
    lam: float = DEFAULT_LAMBDA
    max_iter: int = DEFAULT_MAX_ITER
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"lam musi być > 0, jest {self.lam}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter musi być >= 1, jest {self.max_iter}")
        if self.tol < 0:
            raise ValueError(f"tol musi być >= 0, jest {self.tol}")


@dataclass(frozen=True)
class SparseSolution:
    coefficients: np.ndarray
    iterations: int
    final_objective: float
    lam: float
    converged: bool


# ============================================
# BUILDING BLOCKS
# ============================================

def soft_threshold(values: np.ndarray, threshold: float) -> np.ndarray:
    """Operator proksymalny normy l1."""
    return np.sign(values) * np.maximum(np.abs(values) - threshold, 0.0)


def lasso_objective(A: np.ndarray, y: np.ndarray, alpha: np.ndarray, lam: float) -> float:
    residual = A @ alpha - y
    return 0.5 * float(residual @ residual) + lam * float(np.abs(alpha).sum())


def smooth_gradient(A: np.ndarray, y: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    """Gradient g(a) = (1/2)||A a - y||^2: A^T (A a - y)."""
    return A.T @ (A @ alpha - y)


def estimate_lipschitz(A: np.ndarray, iterations: int = POWER_ITERATIONS, rtol: float = 1e-10) -> float:
    """
    Największa wartość własna A^T A metodą potęgową (start z generatora o stałym ziarnie).

    Zwraca 0 dla macierzy zerowej.
    """
    n = A.shape[1]
    vector = np.random.default_rng(0).standard_normal(n)
    vector /= np.linalg.norm(vector)
    estimate = 0.0
    for _ in range(iterations):
        product = A.T @ (A @ vector)
        norm = float(np.linalg.norm(product))
        if norm == 0.0:
            return 0.0
        vector = product / norm
        previous, estimate = estimate, norm
        if abs(estimate - previous) <= rtol * estimate:
            break
    # Rayleigh quotient dla zbieżnego wektora
    return float(vector @ (A.T @ (A @ vector)))


def _validate(A: np.ndarray, y: np.ndarray):
    if A.ndim != 2 or y.ndim != 1 or A.shape[0] != y.shape[0]:
        raise SolverInputError(f"Niezgodne wymiary: A {A.shape}, y {y.shape}")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(y))):
        raise SolverInputError("A i y muszą zawierać wyłącznie wartości skończone")


# ============================================
# FISTA
# ============================================

def solve_l1(A, y, params: SolverParams = SolverParams(),
             gram: Optional[np.ndarray] = None,
             lipschitz: Optional[float] = None) -> SparseSolution:
    """
    Przyspieszony gradient proksymalny dla lasso.

    Stop: względny spadek funkcji celu < tol albo max_iter (wtedy converged=False
    i ostrzeżenie w logu - to nie jest błąd).

    Args:
        A: macierz m x n (kolumny o normie 1)
        y: wektor m
        params: lam, max_iter, tol
        gram: opcjonalnie A^T A (przy wielu próbkach dla jednego słownika)
        lipschitz: opcjonalnie L (jak wyżej)

    Example:
        >>> sol = solve_l1(A, A[:, 3], SolverParams(lam=1e-4))
        >>> int(np.argmax(sol.coefficients))
        3
    """
    A = np.asarray(A, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    _validate(A, y)
    n = A.shape[1]

    G = A.T @ A if gram is None else gram
    L = estimate_lipschitz(A) if lipschitz is None else lipschitz
    Aty = A.T @ y
    yty = float(y @ y)
    lam = params.lam

    def objective(alpha: np.ndarray) -> float:
        return 0.5 * float(alpha @ (G @ alpha)) - float(alpha @ Aty) + 0.5 * yty + lam * float(np.abs(alpha).sum())

    x = np.zeros(n)
    if L <= 0.0:
        # A = 0: minimum w a = 0
        return SparseSolution(coefficients=x, iterations=0, final_objective=0.5 * yty, lam=lam, converged=True)

    step = 1.0 / L
    point = x.copy()
    t = 1.0
    momentum = False
    f_prev = objective(x)
    converged = False
    iterations = 0

    for iterations in range(1, params.max_iter + 1):
        candidate = soft_threshold(point - step * (G @ point - Aty), lam * step)
        f_new = objective(candidate)

        if f_new > f_prev:
            if not momentum:
                # Zwykły krok proksymalny nie poprawia już celu
                converged = True
                break
            point, t, momentum = x.copy(), 1.0, False
            continue

        t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        point = candidate + ((t - 1.0) / t_next) * (candidate - x)
        momentum = t > 1.0
        decrease = (f_prev - f_new) / max(f_prev, np.finfo(np.float64).tiny)
        x, t, f_prev = candidate, t_next, f_new
        if decrease < params.tol:
            converged = True
            break

    if not converged:
        logger.warning(f"[SOLVER] Brak zbieżności po {params.max_iter} iteracjach (cel={f_prev:.3e})")

    # Cel przeliczony bezpośrednio (bez rozwinięcia przez macierz Grama)
    final = max(lasso_objective(A, y, x, lam), 0.0)
    return SparseSolution(coefficients=x, iterations=iterations, final_objective=final,
                          lam=lam, converged=converged)


# ============================================
# ORACLE
# ============================================

def solve_l1_coordinate_descent(A, y, lam: float, max_sweeps: int = 10000, tol: float = 1e-12) -> np.ndarray:
    """
    Cykliczny coordinate descent dla tego samego problemu lasso.

    Wyrocznia do testów solve_l1 - nie jest ścieżką produkcyjną.
    """
    A = np.asarray(A, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    _validate(A, y)
    if not lam > 0:
        raise ValueError(f"lam musi być > 0, jest {lam}")

    n = A.shape[1]
    col_sq = np.einsum('ij,ij->j', A, A)
    alpha = np.zeros(n)
    residual = y.copy()

    for _ in range(max_sweeps):
        largest_change = 0.0
        for j in range(n):
            if col_sq[j] == 0.0:
                continue
            rho = float(A[:, j] @ residual) + col_sq[j] * alpha[j]
            updated = float(soft_threshold(np.array(rho), lam)) / col_sq[j]
            change = updated - alpha[j]
            if change != 0.0:
                residual -= change * A[:, j]
                alpha[j] = updated
                largest_change = max(largest_change, abs(change))
        if largest_change < tol:
            break
    return alpha
