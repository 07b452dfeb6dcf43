"""Disentangled states with separability certificates, the PPT test,
and local (LOCC-style) channel actions.

A `SeparableEnsemble` is a convex combination of product states across a
partition of the parties; it certifies its own separability by
construction. Each term carries its own ``grouping``: a partition of the
party set into blocks, with one (possibly internally entangled) state
per block. The fully separable case has every block a singleton.

Membership of a density matrix in the disentangled set is decided here
only where a sound criterion exists: the positive-partial-transpose test
is conclusive exactly for 2x2 and 2x3 bipartite systems. Larger systems
get ``conclusive=False`` rather than a guess.

Local channels act party-by-party through Kraus operators; applying one
to an ensemble keeps the ensemble form (one output term per input term
and Kraus multi-index), which is the structural sense in which local
actions preserve disentanglement.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import reduce
from math import prod

import numpy as np

from .errors import DomainError, UnsupportedConfigError, ValidationError
from .linalg import (DensityMatrix, PureState, partial_transpose, reorder_parties)
from .states import random_pure_vector

WEIGHT_DROP = 1e-14


@dataclass(frozen=True)
class ProductTerm:
    """One product term: a weight, a partition of the parties, and one state per block."""

    weight: float
    factors: tuple
    grouping: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        object.__setattr__(self, "grouping",
                           tuple(tuple(int(p) for p in b) for b in self.grouping))
        if self.weight <= 0.0:
            raise ValidationError(f"term weight {self.weight} is not positive",
                                  invariant="positive-weights")
        if len(self.factors) != len(self.grouping):
            raise ValidationError("one factor per grouping block required",
                                  invariant="grouping")


@dataclass(frozen=True)
class SeparableEnsemble:
    """Convex combination of product states; separable by construction."""

    dims: tuple[int, ...]
    terms: tuple[ProductTerm, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        terms = tuple(self.terms)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "terms", terms)
        if not terms:
            raise ValidationError("ensemble needs at least one term", invariant="terms")
        n = len(dims)
        total = 0.0
        for k, term in enumerate(terms):
            flat = sorted(p for block in term.grouping for p in block)
            if flat != list(range(n)):
                raise ValidationError(
                    f"term {k} grouping {term.grouping} does not partition 0..{n - 1}",
                    invariant="grouping")
            for block, factor in zip(term.grouping, term.factors):
                want = tuple(dims[p] for p in block)
                if tuple(factor.dims) != want:
                    raise ValidationError(
                        f"term {k} factor on block {block} has dims {factor.dims}, "
                        f"expected {want}", invariant="factor-dims")
            total += term.weight
        if abs(total - 1.0) > 1e-12:
            raise ValidationError(f"weights sum to {total}, not 1",
                                  invariant="weight-normalization")

    @property
    def n_parties(self) -> int:
        return len(self.dims)


@dataclass(frozen=True)
class PptReport:
    """Result of the partial-transpose test."""

    is_ppt: bool
    min_eigenvalue: float
    conclusive: bool

    def __post_init__(self):
        if self.is_ppt != (self.min_eigenvalue >= -1e-10):
            raise ValidationError("is_ppt inconsistent with min_eigenvalue",
                                  invariant="ppt-threshold")


def fully_separable_grouping(n: int) -> tuple[tuple[int, ...], ...]:
    return tuple((p,) for p in range(n))


def product_term(weight: float, factors, grouping=None) -> ProductTerm:
    """Convenience constructor; default grouping is one singleton block per factor."""
    if grouping is None:
        grouping = fully_separable_grouping(len(tuple(factors)))
    return ProductTerm(weight=weight, factors=tuple(factors), grouping=grouping)


def _factor_mat(factor) -> np.ndarray:
    if isinstance(factor, PureState):
        v = factor.amplitudes
        return np.outer(v, v.conj())
    return factor.mat


def assemble_density(ensemble: SeparableEnsemble) -> DensityMatrix:
    """Sum of weighted product terms as a density matrix on the natural party order."""
    dims = ensemble.dims
    d = prod(dims)
    out = np.zeros((d, d), dtype=complex)
    for term in ensemble.terms:
        mat = reduce(np.kron, (_factor_mat(f) for f in term.factors))
        seq = [p for block in term.grouping for p in block]
        if seq != list(range(len(dims))):
            seq_dims = tuple(dims[p] for p in seq)
            order = [seq.index(j) for j in range(len(dims))]
            mat = reorder_parties(mat, seq_dims, order)
        out += term.weight * mat
    return DensityMatrix(dims, out)


def ppt_test(rho: DensityMatrix) -> PptReport:
    """Spectrum test of the partial transpose.

    For 2x2 and 2x3 systems a positive partial transpose is equivalent
    to separability and the report is conclusive; for other bipartite
    dimensions PPT is only necessary and ``conclusive`` is False.
    """
    if rho.n_parties != 2:
        raise UnsupportedConfigError(
            f"PPT test needs exactly two parties, got {rho.n_parties}")
    pt = partial_transpose(rho, 1)
    min_eig = float(np.linalg.eigvalsh(pt)[0])
    conclusive = tuple(sorted(rho.dims)) in ((2, 2), (2, 3))
    return PptReport(is_ppt=min_eig >= -1e-10, min_eigenvalue=min_eig,
                     conclusive=conclusive)


@dataclass(frozen=True)
class LocalChannel:
    """One Kraus list per party, each trace-preserving on its local space."""

    kraus: tuple[tuple[np.ndarray, ...], ...]

    def __post_init__(self):
        parties = []
        for p, ops in enumerate(self.kraus):
            mats = []
            d = None
            for m in ops:
                a = np.array(m, dtype=complex)
                if a.ndim != 2 or a.shape[0] != a.shape[1]:
                    raise ValidationError(f"party {p} has a non-square Kraus operator",
                                          invariant="kraus-shape")
                if d is None:
                    d = a.shape[0]
                elif a.shape[0] != d:
                    raise ValidationError(f"party {p} Kraus operators disagree on dimension",
                                          invariant="kraus-shape")
                a.setflags(write=False)
                mats.append(a)
            if not mats:
                raise ValidationError(f"party {p} has no Kraus operators",
                                      invariant="kraus-shape")
            total = sum(a.conj().T @ a for a in mats)
            dev = float(np.max(np.abs(total - np.eye(d))))
            if dev > 1e-9:
                raise ValidationError(
                    f"party {p} Kraus operators miss trace preservation by {dev:.2e}",
                    invariant="trace-preserving")
            parties.append(tuple(mats))
        if not parties:
            raise ValidationError("channel needs at least one party", invariant="kraus-shape")
        object.__setattr__(self, "kraus", tuple(parties))

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(ops[0].shape[0] for ops in self.kraus)


def identity_channel(dims) -> LocalChannel:
    return LocalChannel(tuple((np.eye(int(d), dtype=complex),) for d in dims))


def bit_flip_ops(p: float) -> tuple[np.ndarray, np.ndarray]:
    """Qubit Kraus pair flipping |0> and |1> with probability p."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"flip probability must be in [0, 1], got {p}")
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    return (np.sqrt(1 - p) * np.eye(2, dtype=complex), np.sqrt(p) * x)


def depolarizing_ops(p: float, d: int = 2) -> tuple[np.ndarray, ...]:
    """Kraus set mixing a d-level state toward I/d with probability p."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"depolarizing probability must be in [0, 1], got {p}")
    ops = [np.sqrt(1 - p + p / (d * d)) * np.eye(d, dtype=complex)]
    # Remaining generalized Paulis X^a Z^b, each with weight p/d^2.
    omega = np.exp(2j * np.pi / d)
    shift = np.roll(np.eye(d, dtype=complex), 1, axis=0)
    clock = np.diag(omega ** np.arange(d))
    for a in range(d):
        for b in range(d):
            if a == 0 and b == 0:
                continue
            ops.append(np.sqrt(p) / d * (np.linalg.matrix_power(shift, a)
                                         @ np.linalg.matrix_power(clock, b)))
    return tuple(ops)


def random_local_channel(dims, seed: int, n_kraus: int = 2) -> LocalChannel:
    """Seeded random trace-preserving channel on each party."""
    rng = np.random.default_rng([int(seed) & 0xFFFFFFFF, 23])
    parties = []
    for d in dims:
        d = int(d)
        raw = [rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
               for _ in range(n_kraus)]
        total = sum(a.conj().T @ a for a in raw)
        w, v = np.linalg.eigh(total)
        inv_sqrt = (v / np.sqrt(w)) @ v.conj().T
        parties.append(tuple(a @ inv_sqrt for a in raw))
    return LocalChannel(tuple(parties))


def apply_channel_to_density(rho: DensityMatrix, channel: LocalChannel) -> DensityMatrix:
    """Full Kraus sum of the product channel on a density matrix."""
    if channel.dims != rho.dims:
        raise DomainError(f"channel dims {channel.dims} do not match state dims {rho.dims}")
    out = np.zeros_like(rho.mat)
    for combo in itertools.product(*channel.kraus):
        k = reduce(np.kron, combo)
        out += k @ rho.mat @ k.conj().T
    return DensityMatrix(rho.dims, out)


def _apply_op_to_factor(op: np.ndarray, factor):
    """Apply one Kraus operator to a local state; returns (state or None, weight)."""
    if isinstance(factor, PureState):
        vec = op @ factor.amplitudes
        w = float(np.vdot(vec, vec).real)
        if w <= WEIGHT_DROP:
            return None, 0.0
        return PureState(factor.dims, vec / np.sqrt(w)), w
    mat = op @ factor.mat @ op.conj().T
    w = float(np.trace(mat).real)
    if w <= WEIGHT_DROP:
        return None, 0.0
    return DensityMatrix(factor.dims, mat / w), w


def apply_local_channel(ensemble: SeparableEnsemble,
                        channel: LocalChannel) -> SeparableEnsemble:
    """Channel action on an ensemble, term by term and Kraus index by Kraus index.

    Requires a fully separable ensemble (singleton blocks). Pure factors
    stay pure because each Kraus operator is applied separately; the
    assembled density of the output equals the channel applied to the
    assembled input. Terms below weight 1e-14 are dropped and the rest
    renormalized.
    """
    if channel.dims != ensemble.dims:
        raise DomainError(f"channel dims {channel.dims} do not match ensemble dims "
                          f"{ensemble.dims}")
    singleton = fully_separable_grouping(ensemble.n_parties)
    out_terms = []
    for term in ensemble.terms:
        if term.grouping != singleton:
            raise DomainError("channel application needs a fully separable grouping "
                              "(all singleton blocks)")
        for combo in itertools.product(*channel.kraus):
            w = term.weight
            factors = []
            for op, factor in zip(combo, term.factors):
                new_factor, fw = _apply_op_to_factor(op, factor)
                if new_factor is None:
                    w = 0.0
                    break
                factors.append(new_factor)
                w *= fw
            if w > WEIGHT_DROP:
                out_terms.append(ProductTerm(weight=w, factors=tuple(factors),
                                             grouping=singleton))
    total = sum(t.weight for t in out_terms)
    normalized = tuple(ProductTerm(weight=t.weight / total, factors=t.factors,
                                   grouping=t.grouping) for t in out_terms)
    return SeparableEnsemble(dims=ensemble.dims, terms=normalized)


def random_separable(dims, n_terms: int, seed: int) -> SeparableEnsemble:
    """Seeded random fully separable ensemble: flat simplex weights, Haar product factors."""
    if n_terms < 1:
        raise DomainError(f"n_terms must be >= 1, got {n_terms}")
    dims = tuple(int(d) for d in dims)
    rng = np.random.default_rng([int(seed) & 0xFFFFFFFF, 17])
    weights = rng.dirichlet(np.ones(n_terms))
    grouping = fully_separable_grouping(len(dims))
    terms = []
    for t in range(n_terms):
        factors = tuple(PureState((d,), random_pure_vector(d, rng)) for d in dims)
        terms.append(ProductTerm(weight=float(weights[t]), factors=factors,
                                 grouping=grouping))
    return SeparableEnsemble(dims=dims, terms=tuple(terms))
