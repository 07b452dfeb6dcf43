"""State constructors: named fixtures and seeded random generators."""

from __future__ import annotations

from math import prod

import numpy as np

from .errors import DomainError
from .linalg import DensityMatrix, PureState


def basis_state(dims, occupation) -> PureState:
    """Computational basis vector |i1 i2 ...> for the given per-party indices."""
    dims = tuple(int(d) for d in dims)
    idx = 0
    for d, i in zip(dims, occupation):
        if not 0 <= i < d:
            raise DomainError(f"basis index {i} out of range for dimension {d}")
        idx = idx * d + i
    vec = np.zeros(prod(dims), dtype=complex)
    vec[idx] = 1.0
    return PureState(dims, vec)


def bell_plus() -> PureState:
    """(|00> + |11>)/sqrt(2)."""
    return PureState((2, 2), np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2))


def bell_minus() -> PureState:
    """(|00> - |11>)/sqrt(2)."""
    return PureState((2, 2), np.array([1, 0, 0, -1], dtype=complex) / np.sqrt(2))


def cc_mix() -> DensityMatrix:
    """The classically correlated mixture (|00><00| + |11><11|)/2."""
    m = np.zeros((4, 4), dtype=complex)
    m[0, 0] = m[3, 3] = 0.5
    return DensityMatrix((2, 2), m)


def werner(fidelity: float) -> DensityMatrix:
    """F |phi+><phi+| + (1-F)(I - |phi+><phi+|)/3 on two qubits."""
    if not 0.0 <= fidelity <= 1.0:
        raise DomainError(f"fidelity must be in [0, 1], got {fidelity}")
    p = bell_plus().to_density().mat
    m = fidelity * p + (1.0 - fidelity) * (np.eye(4) - p) / 3.0
    return DensityMatrix((2, 2), m)


def schmidt_pure(theta: float) -> PureState:
    """cos(theta)|00> + sin(theta)|11>."""
    vec = np.zeros(4, dtype=complex)
    vec[0] = np.cos(theta)
    vec[3] = np.sin(theta)
    return PureState((2, 2), vec)


def maximally_mixed(dims) -> DensityMatrix:
    """I/d on the given dims (a single integer means one party)."""
    if np.isscalar(dims):
        dims = (int(dims),)
    dims = tuple(int(d) for d in dims)
    d = prod(dims)
    return DensityMatrix(dims, np.eye(d, dtype=complex) / d)


def ghz(n_parties: int) -> PureState:
    """(|0...0> + |1...1>)/sqrt(2) on n qubits."""
    if n_parties < 2:
        raise DomainError(f"GHZ needs at least 2 parties, got {n_parties}")
    vec = np.zeros(2 ** n_parties, dtype=complex)
    vec[0] = vec[-1] = 1.0 / np.sqrt(2)
    return PureState((2,) * n_parties, vec)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a Ginibre matrix with phase fixing."""
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


def random_pure_vector(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unit vector."""
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return z / np.linalg.norm(z)


def random_density(dims, rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    """Random full-rank (or fixed-rank) state from the Ginibre ensemble."""
    if np.isscalar(dims):
        dims = (int(dims),)
    dims = tuple(int(d) for d in dims)
    d = prod(dims)
    k = d if rank is None else int(rank)
    g = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    m = g @ g.conj().T
    return DensityMatrix(dims, m / np.trace(m).real)
