"""Quantum relative entropy and measurement-based distinguishability.

The quantum relative entropy

    S(sigma||rho) = tr(sigma ln sigma - sigma ln rho)   (nats)

is computed spectrally: both operators are diagonalized, logs act on
eigenvalues above a relative support cutoff, and the result is +inf
(``math.inf``) whenever sigma places more than negligible weight outside
the support of rho. exp(-N S) is the large-N probability of confusing N
copies of rho with sigma.

A measurement A = {A_i} turns the pair into classical distributions
p_i = tr(A_i sigma), q_i = tr(A_i rho); the measured relative entropy is
the best classical divergence achievable that way. The search space here
is rank-1 projective measurements, parametrized by a unitary applied on
top of restart-specific bases (eigenbases of rho, sigma, their
difference, and a generic mixture, plus Haar-random unitaries). Values
are therefore lower bounds on the supremum over all measurements; on
commuting pairs the eigenbasis start attains the quantum value exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classical import ProbDist
from .errors import DomainError, UnsupportedConfigError, ValidationError
from .linalg import DIM_CAP, DensityMatrix
from .optimize import (OptimizerBudget, derive_rng, indexed_search, n_unitary_params,
                       nelder_mead, spread_of_best, unitary_from_params)
from .states import random_unitary

# Relative support cutoff: eigenvalues below SUPP_TOL * max eigenvalue count
# as zero. Sigma-mass outside the support of rho above OUTSIDE_MASS_TOL makes
# the relative entropy infinite rather than merely large.
SUPP_TOL = 1e-12
OUTSIDE_MASS_TOL = 1e-10

# Generic mixing coefficient for the shared-eigenbasis start; breaks the
# spectral degeneracies that can hide a common eigenbasis of a commuting pair.
_GENERIC_MIX = 0.6180339887498949

DEFAULT_MEASUREMENT_BUDGET = OptimizerBudget(restarts=32, max_iters=2000,
                                             tolerance=1e-9, seed=0)


@dataclass(frozen=True)
class Povm:
    """A finite measurement: PSD effects summing to the identity."""

    effects: tuple[np.ndarray, ...]

    def __post_init__(self):
        effs = []
        d = None
        for k, e in enumerate(self.effects):
            m = np.array(e, dtype=complex)
            if m.ndim != 2 or m.shape[0] != m.shape[1]:
                raise ValidationError(f"effect {k} is not square", invariant="shape")
            if d is None:
                d = m.shape[0]
            elif m.shape[0] != d:
                raise ValidationError("effects have mismatched dimensions",
                                      invariant="shape")
            lo = float(np.linalg.eigvalsh(m)[0])
            if lo < -1e-10:
                raise ValidationError(f"effect {k} has eigenvalue {lo:.2e}",
                                      invariant="effect-psd")
            m.setflags(write=False)
            effs.append(m)
        if not effs:
            raise ValidationError("a POVM needs at least one effect", invariant="shape")
        total = sum(effs)
        dev = float(np.max(np.abs(total - np.eye(d))))
        if dev > 1e-9:
            raise ValidationError(f"effects sum differs from identity by {dev:.2e}",
                                  invariant="completeness")
        object.__setattr__(self, "effects", tuple(effs))

    @property
    def dim(self) -> int:
        return self.effects[0].shape[0]

    @classmethod
    def projective(cls, unitary: np.ndarray) -> "Povm":
        """Rank-1 projectors onto the columns of a unitary."""
        u = np.asarray(unitary, dtype=complex)
        return cls(tuple(np.outer(u[:, i], u[:, i].conj()) for i in range(u.shape[1])))

    @classmethod
    def computational(cls, d: int) -> "Povm":
        return cls.projective(np.eye(d, dtype=complex))


@dataclass(frozen=True)
class MeasuredRelEntropyResult:
    """Best measured divergence found, with the measurement that achieved it."""

    value: float
    best_povm: Povm
    n_restarts: int
    converged: bool

    def __post_init__(self):
        if self.value < -1e-9:
            raise ValidationError(f"value {self.value} below -1e-9", invariant="nonneg")


def _support_split(mat: np.ndarray):
    """Eigenvalues, eigenvectors and the boolean support mask of a state."""
    w, v = np.linalg.eigh(mat)
    w = np.clip(w, 0.0, None)
    top = float(w[-1]) if w.size else 0.0
    supp = w > SUPP_TOL * max(top, 1.0e-300)
    return w, v, supp


def quantum_relative_entropy(sigma: DensityMatrix, rho: DensityMatrix) -> float:
    """S(sigma||rho) = tr(sigma ln sigma - sigma ln rho) in nats.

    +inf when sigma carries more than OUTSIDE_MASS_TOL of weight outside
    the support of rho; reduces to the classical divergence of the
    spectra for commuting pairs.
    """
    if sigma.dim != rho.dim:
        raise DomainError(f"dimension mismatch: {sigma.dim} vs {rho.dim}")
    ws, _, supps = _support_split(sigma.mat)
    pos = ws[supps]
    tr_sig_ln_sig = float(np.sum(pos * np.log(pos)))
    wr, vr, suppr = _support_split(rho.mat)
    overlap = np.einsum("ij,ik,kj->j", vr.conj(), sigma.mat, vr).real
    outside = float(np.sum(overlap[~suppr]))
    if outside > OUTSIDE_MASS_TOL:
        return math.inf
    tr_sig_ln_rho = float(overlap[suppr] @ np.log(wr[suppr]))
    return tr_sig_ln_sig - tr_sig_ln_rho


def quantum_confusion_probability(sigma: DensityMatrix, rho: DensityMatrix,
                                  n_copies: int) -> float:
    """exp(-N S(sigma||rho)); zero when the relative entropy is infinite."""
    s = quantum_relative_entropy(sigma, rho)
    if math.isinf(s):
        return 0.0
    return math.exp(-n_copies * s)


def povm_outcome_dist(povm: Povm, state: DensityMatrix) -> ProbDist:
    """Outcome distribution p_i = tr(A_i rho) of a measurement on a state."""
    if povm.dim != state.dim:
        raise DomainError(f"dimension mismatch: POVM {povm.dim} vs state {state.dim}")
    p = np.array([float(np.trace(e @ state.mat).real) for e in povm.effects])
    if np.any(p < -1e-12):
        raise ValidationError(f"outcome probability {p.min():.2e} below -1e-12",
                              invariant="outcome-positivity")
    p = np.clip(p, 0.0, None)
    s = float(p.sum())
    if abs(s - 1.0) > 1e-10:
        raise ValidationError(f"outcome probabilities sum to {s}", invariant="normalization")
    return ProbDist(p / s)


def _measured_kl(u: np.ndarray, sig: np.ndarray, rho: np.ndarray) -> float:
    """Classical divergence of the two outcome distributions of basis u."""
    p = ((sig @ u) * u.conj()).real.sum(axis=0)
    q = ((rho @ u) * u.conj()).real.sum(axis=0)
    np.clip(p, 0.0, None, out=p)
    # The support precheck rules out genuine mass on zero-probability
    # outcomes; the floor only guards against log(0) from round-off.
    np.clip(q, 1e-300, None, out=q)
    mask = p > 1e-18
    pm = p[mask]
    return float(np.sum(pm * (np.log(pm) - np.log(q[mask]))))


def _fixed_bases(sig: np.ndarray, rho: np.ndarray) -> list[np.ndarray]:
    bases = []
    for m in (rho, sig, sig - rho, sig + _GENERIC_MIX * rho):
        _, v = np.linalg.eigh(m)
        bases.append(v)
    return bases


def _search_measurement(sig: np.ndarray, rho: np.ndarray, budget: OptimizerBudget,
                        workers: int, extra_bases=()):
    """Multistart maximization of the measured divergence over projective bases.

    Returns (best value, best unitary, merged values). Every fixed base
    is evaluated at its seed point regardless of the restart budget, so
    eigenbasis guarantees do not depend on the number of restarts.
    """
    d = sig.shape[0]
    npar = n_unitary_params(d)
    fixed = _fixed_bases(sig, rho) + [np.asarray(b, dtype=complex) for b in extra_bases]

    best_val = -math.inf
    best_u = None
    values = []
    for base in fixed:
        val = _measured_kl(base, sig, rho)
        values.append(val)
        if val > best_val:
            best_val, best_u = val, base

    def run(i):
        base = fixed[i] if i < len(fixed) else random_unitary(d, derive_rng(budget.seed, 11, i))

        def negated(x):
            return -_measured_kl(base @ unitary_from_params(x, d), sig, rho)

        x, fx = nelder_mead(negated, np.zeros(npar), budget.max_iters,
                            ftol=budget.tolerance, delta=0.3)
        return fx, base @ unitary_from_params(x, d)

    neg_best, u, neg_vals = indexed_search(run, budget.restarts, workers=workers)
    values.extend(-v for v in neg_vals)
    if -neg_best > best_val:
        best_val, best_u = -neg_best, u
    return best_val, best_u, values


def measured_relative_entropy(sigma: DensityMatrix, rho: DensityMatrix,
                              budget: OptimizerBudget | None = None,
                              workers: int = 1) -> MeasuredRelEntropyResult:
    """Best classical divergence of measurement outcomes on (sigma, rho).

    Maximizes D(p||q) with p, q the outcome distributions of a rank-1
    projective measurement, over the unitary defining the basis. The
    returned value is a lower bound on the supremum over all
    measurements and never exceeds S(sigma||rho). When sigma has support
    outside rho the result is +inf, witnessed by measuring in the
    eigenbasis of rho.
    """
    if sigma.dim != rho.dim:
        raise DomainError(f"dimension mismatch: {sigma.dim} vs {rho.dim}")
    budget = budget or DEFAULT_MEASUREMENT_BUDGET
    if math.isinf(quantum_relative_entropy(sigma, rho)):
        _, v = np.linalg.eigh(rho.mat)
        return MeasuredRelEntropyResult(value=math.inf, best_povm=Povm.projective(v),
                                        n_restarts=0, converged=True)
    val, u, values = _search_measurement(sigma.mat, rho.mat, budget, workers)
    return MeasuredRelEntropyResult(
        value=val,
        best_povm=Povm.projective(u),
        n_restarts=budget.restarts,
        converged=spread_of_best([-v for v in values], k=2) <= 1e-6,
    )


def n_copy_measured_relative_entropy(sigma: DensityMatrix, rho: DensityMatrix,
                                     n_copies: int,
                                     budget: OptimizerBudget | None = None,
                                     workers: int = 1) -> MeasuredRelEntropyResult:
    """Per-copy measured divergence for joint measurements on N copies.

    Optimizes the measured divergence on sigma^(x)N vs rho^(x)N and
    divides by N. Besides the usual starts, each level is seeded with
    the best (N-1)-copy measurement tensored with the best single-copy
    one, so the value can never fall below the product-measurement
    combination of the lower levels.
    """
    if sigma.dim != rho.dim:
        raise DomainError(f"dimension mismatch: {sigma.dim} vs {rho.dim}")
    if n_copies < 1:
        raise DomainError(f"need n_copies >= 1, got {n_copies}")
    if sigma.dim ** n_copies > DIM_CAP:
        raise UnsupportedConfigError(
            f"{n_copies} copies of dimension {sigma.dim} exceed the dense cap of {DIM_CAP}")
    budget = budget or DEFAULT_MEASUREMENT_BUDGET
    if math.isinf(quantum_relative_entropy(sigma, rho)):
        return measured_relative_entropy(sigma, rho, budget, workers)

    sig_k, rho_k = sigma.mat, rho.mat
    val, u, values = _search_measurement(sigma.mat, rho.mat, budget, workers)
    u_one = u_prev = u_pow = u
    for k in range(2, n_copies + 1):
        sig_k = np.kron(sig_k, sigma.mat)
        rho_k = np.kron(rho_k, rho.mat)
        u_pow = np.kron(u_pow, u_one)
        extras = [np.kron(u_prev, u_one)]
        if k > 2:
            extras.append(u_pow)
        val, u, values = _search_measurement(sig_k, rho_k, budget, workers,
                                             extra_bases=extras)
        u_prev = u
    return MeasuredRelEntropyResult(
        value=val / n_copies,
        best_povm=Povm.projective(u_prev),
        n_restarts=budget.restarts,
        converged=spread_of_best([-v for v in values], k=2) <= 1e-6 * n_copies,
    )
