"""Dense complex linear algebra for small multipartite Hilbert spaces.

Everything here is exact dense numerics on total dimension at most
``DIM_CAP`` (64): Hermitian eigendecomposition, tensor products, partial
trace, partial transpose and spectral entropy. All entropic quantities
are in nats (natural logarithm); multiply by ``1/ln 2`` for bits.

Values are immutable after construction and safe to share across
threads; every operation is a pure function of its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod

import numpy as np

from .errors import DomainError, UnsupportedConfigError, ValidationError

DIM_CAP = 64

HERM_TOL = 1e-12
TRACE_TOL = 1e-10
PSD_TOL = 1e-10
# Eigenvalues in [-EIG_CLAMP, 0] are rounded up to zero before logs;
# anything more negative is a genuine PSD violation.
EIG_CLAMP = 1e-10

NATS_PER_BIT = float(np.log(2.0))


def _frozen_array(x, shape, dtype=complex) -> np.ndarray:
    arr = np.array(x, dtype=dtype)
    if arr.shape != shape:
        raise ValidationError(f"expected array of shape {shape}, got {arr.shape}",
                              invariant="shape")
    arr.setflags(write=False)
    return arr


def _check_dims(dims) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 1 for d in dims):
        raise ValidationError(f"dims must be positive integers, got {dims}",
                              invariant="dims")
    if prod(dims) > DIM_CAP:
        raise UnsupportedConfigError(
            f"total dimension {prod(dims)} exceeds the dense cap of {DIM_CAP}")
    return dims


def max_abs_diff(a: np.ndarray, b: np.ndarray) -> float:
    """Entrywise maximum absolute difference, the comparison norm used throughout."""
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


@dataclass(frozen=True)
class DensityMatrix:
    """A d x d Hermitian, PSD, unit-trace operator with per-party dimensions.

    ``dims`` lists the local dimension of each tensor factor; ``mat`` is
    the full matrix on the product space, row-major in the product basis
    with the last party varying fastest.
    """

    dims: tuple[int, ...]
    mat: np.ndarray

    def __post_init__(self):
        dims = _check_dims(self.dims)
        d = prod(dims)
        mat = _frozen_array(self.mat, (d, d))
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "mat", mat)
        herm = float(np.max(np.abs(mat - mat.conj().T)))
        if herm > HERM_TOL:
            raise ValidationError(f"matrix is not Hermitian (deviation {herm:.2e})",
                                  invariant="hermitian")
        tr = complex(np.trace(mat))
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValidationError(f"trace is {tr}, not 1", invariant="unit-trace")
        lo = float(np.linalg.eigvalsh(mat)[0])
        if lo < -PSD_TOL:
            raise ValidationError(f"smallest eigenvalue {lo:.2e} below -{PSD_TOL}",
                                  invariant="psd")

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @property
    def n_parties(self) -> int:
        return len(self.dims)


@dataclass(frozen=True)
class PureState:
    """A unit vector on a multipartite space."""

    dims: tuple[int, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        dims = _check_dims(self.dims)
        d = prod(dims)
        vec = _frozen_array(self.amplitudes, (d,))
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", vec)
        nrm = float(np.linalg.norm(vec))
        if abs(nrm - 1.0) > 1e-12:
            raise ValidationError(f"norm is {nrm}, not 1", invariant="unit-norm")

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def to_density(self) -> DensityMatrix:
        v = self.amplitudes
        return DensityMatrix(self.dims, np.outer(v, v.conj()))


@dataclass(frozen=True)
class HermitianEig:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        w = np.array(self.eigenvalues, dtype=float)
        v = np.array(self.eigenvectors, dtype=complex)
        w.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "eigenvalues", w)
        object.__setattr__(self, "eigenvectors", v)


def herm_eig(matrix: np.ndarray) -> HermitianEig:
    """Eigendecomposition of a Hermitian matrix.

    Eigenvalues come out real and ascending, eigenvectors as the columns
    of a unitary; the reconstruction ``V diag(w) V^dag`` agrees with the
    input to 1e-10 entrywise.
    """
    mat = np.asarray(matrix, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {mat.shape}")
    dev = float(np.max(np.abs(mat - mat.conj().T)))
    if dev > 1e-10:
        raise DomainError(f"matrix is not Hermitian (deviation {dev:.2e})")
    w, v = np.linalg.eigh(mat)
    return HermitianEig(w, v)


def tensor(a: DensityMatrix, b: DensityMatrix) -> DensityMatrix:
    """Kronecker product of two states; dims concatenate, traces multiply."""
    return DensityMatrix(a.dims + b.dims, np.kron(a.mat, b.mat))


def tensor_power(a: DensityMatrix, n: int) -> DensityMatrix:
    """n-fold tensor product of a state with itself."""
    if n < 1:
        raise DomainError(f"tensor power needs n >= 1, got {n}")
    out = a
    for _ in range(n - 1):
        out = tensor(out, a)
    return out


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Trace out every party not listed in ``keep``.

    The result lives on the kept parties in their original order and has
    the same trace as the input.
    """
    keep = sorted(set(int(k) for k in keep))
    n = rho.n_parties
    if not keep:
        raise DomainError("keep must be a nonempty set of party indices")
    if keep[0] < 0 or keep[-1] >= n:
        raise DomainError(f"party index out of range: keep={keep}, parties=0..{n - 1}")
    dims = rho.dims
    tens = rho.mat.reshape(dims + dims)
    traced = [p for p in range(n) if p not in keep]
    # Trace highest axes first so earlier positions stay valid.
    offset = n
    for p in sorted(traced, reverse=True):
        tens = np.trace(tens, axis1=p, axis2=p + offset)
        offset -= 1
    kept_dims = tuple(dims[p] for p in keep)
    d = prod(kept_dims)
    return DensityMatrix(kept_dims, tens.reshape(d, d))


def partial_transpose(rho: DensityMatrix, party: int) -> np.ndarray:
    """Transpose one factor of a two-party state.

    Returns a plain Hermitian matrix: the result is generally not PSD,
    which is exactly what the separability test looks for.
    """
    if rho.n_parties != 2:
        raise UnsupportedConfigError(
            f"partial transpose is defined here for exactly two parties, got {rho.n_parties}")
    if party not in (0, 1):
        raise DomainError(f"party must be 0 or 1, got {party}")
    da, db = rho.dims
    t = rho.mat.reshape(da, db, da, db)
    if party == 0:
        t = t.transpose(2, 1, 0, 3)
    else:
        t = t.transpose(0, 3, 2, 1)
    return t.reshape(da * db, da * db)


def reorder_parties(mat: np.ndarray, dims, order) -> np.ndarray:
    """Permute tensor factors of a matrix: slot k of the output is party order[k]."""
    dims = tuple(int(d) for d in dims)
    order = tuple(int(p) for p in order)
    n = len(dims)
    if sorted(order) != list(range(n)):
        raise DomainError(f"order {order} is not a permutation of 0..{n - 1}")
    d = prod(dims)
    t = np.asarray(mat).reshape(dims + dims)
    axes = order + tuple(p + n for p in order)
    return t.transpose(axes).reshape(d, d)


def clamped_spectrum(mat: np.ndarray) -> np.ndarray:
    """Ascending eigenvalues with round-off negatives ([-1e-10, 0]) set to zero."""
    w = np.linalg.eigvalsh(mat)
    if w[0] < -EIG_CLAMP:
        raise ValidationError(f"eigenvalue {w[0]:.2e} below -{EIG_CLAMP}",
                              invariant="psd")
    return np.clip(w, 0.0, None)


def entropy_of_spectrum(w: np.ndarray) -> float:
    """-sum w ln w over the positive part, with 0 ln 0 = 0."""
    w = np.asarray(w, dtype=float)
    pos = w[w > 0.0]
    return float(-np.sum(pos * np.log(pos)))


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """Spectral entropy -sum(lam ln lam) in nats; 0 for pure states, ln d at most."""
    return entropy_of_spectrum(clamped_spectrum(rho.mat))
