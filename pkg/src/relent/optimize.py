"""Multistart derivative-free search infrastructure.

Every stochastic search in the package runs through `indexed_search`:
restart i derives its own RNG stream from (seed, restart index), results
merge in index order, and ties keep the lowest index. That makes every
result reproducible from its `OptimizerBudget` and independent of how
many worker threads executed the restarts.

The local step is a Nelder-Mead simplex refit (scipy) with an explicit
initial simplex; unitaries are parametrized as a product of two-level
rotations (an angle and a phase per coordinate pair) times a diagonal of
phases, d*d real parameters in total, applied on top of a restart-
specific base unitary so that the search starts exactly at the base.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .errors import DomainError


@dataclass(frozen=True)
class OptimizerBudget:
    """Reproducibility record for a stochastic search."""

    restarts: int = 32
    max_iters: int = 2000
    tolerance: float = 1e-9
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1:
            raise DomainError(f"restarts must be >= 1, got {self.restarts}")
        if self.max_iters < 1:
            raise DomainError(f"max_iters must be >= 1, got {self.max_iters}")


def derive_rng(seed: int, *key: int) -> np.random.Generator:
    """Deterministic per-task RNG stream from a seed and integer key path."""
    return np.random.default_rng([int(seed) & 0xFFFFFFFF, *[int(k) for k in key]])


def nelder_mead(f, x0, max_iters: int, ftol: float, delta: float = 0.2):
    """Simplex descent from x0 with an explicit initial simplex scale.

    Returns (x, fx) for the best vertex; fx never exceeds f(x0).
    """
    x0 = np.asarray(x0, dtype=float)
    n = x0.size
    simplex = np.tile(x0, (n + 1, 1))
    for i in range(n):
        simplex[i + 1, i] += delta * max(1.0, abs(x0[i]))
    res = minimize(f, x0, method="Nelder-Mead",
                   options=dict(maxiter=max_iters, xatol=1e-10, fatol=ftol,
                                initial_simplex=simplex))
    f0 = f(x0)
    if res.fun < f0:
        return res.x, float(res.fun)
    return x0, float(f0)


def indexed_search(run_restart, n_restarts: int, workers: int = 1, stop_when=None):
    """Run restarts 0..n-1, merging results deterministically in index order.

    ``run_restart(i)`` returns (value, payload); the best value is the
    minimum, ties resolved toward the lowest index. ``stop_when(best)``
    (checked after merging each index, in order) allows an early exit
    that does not depend on worker count: later indices may have been
    computed already but are discarded unmerged.

    Returns (best_value, best_payload, all_merged_values).
    """
    if n_restarts < 1:
        raise DomainError("need at least one restart")
    workers = max(1, int(workers))
    best_val = None
    best_payload = None
    values: list[float] = []

    def merge(result) -> bool:
        nonlocal best_val, best_payload
        val, payload = result
        values.append(val)
        if best_val is None or val < best_val:
            best_val, best_payload = val, payload
        return stop_when is not None and stop_when(best_val)

    if workers == 1:
        for i in range(n_restarts):
            if merge(run_restart(i)):
                break
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            stopped = False
            for lo in range(0, n_restarts, workers):
                chunk = range(lo, min(lo + workers, n_restarts))
                for result in pool.map(run_restart, chunk):
                    if merge(result):
                        stopped = True
                        break
                if stopped:
                    break
    return best_val, best_payload, values


def spread_of_best(values, k: int = 3) -> float:
    """Spread (max - min) of the k smallest values; inf if fewer than k."""
    if len(values) < k:
        return np.inf
    best = sorted(values)[:k]
    return float(best[-1] - best[0])


def n_unitary_params(d: int) -> int:
    """Parameter count of the two-level-rotation parametrization: d*d."""
    return d * d


def unitary_from_params(x, d: int) -> np.ndarray:
    """Unitary from d(d-1) rotation parameters plus d phases.

    Each coordinate pair (i, j) contributes a rotation angle and a
    relative phase; a diagonal of d phases follows. At x = 0 this is the
    identity.
    """
    x = np.asarray(x, dtype=float)
    if x.size != d * d:
        raise DomainError(f"expected {d * d} parameters for dimension {d}, got {x.size}")
    u = np.eye(d, dtype=complex)
    k = 0
    for i in range(d):
        for j in range(i + 1, d):
            th = x[k]
            ph = x[k + 1]
            k += 2
            c = np.cos(th)
            s = np.sin(th)
            e = np.exp(1j * ph)
            row_i = u[i].copy()
            row_j = u[j].copy()
            u[i] = c * row_i - s * e * row_j
            u[j] = s * np.conj(e) * row_i + c * row_j
    return np.exp(1j * x[k:k + d])[:, None] * u
