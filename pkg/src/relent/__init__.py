"""relent: how distinguishable are two states, and how entangled is one?

Classical and quantum relative entropy, measured and N-copy variants via
measurement optimization, confusion probabilities with Monte Carlo
verification, and the relative entropy of entanglement as the minimal
distinguishability from the separable set.
"""

from .classical import (ConfusionReport, ProbDist, binomial_exact_prob,
                        confusion_probability, kl_divergence, simulate_inference,
                        stirling_exponent)
from .errors import (DomainError, RelentError, UnsupportedConfigError,
                     ValidationError)
from .linalg import (DIM_CAP, DensityMatrix, HermitianEig, PureState, herm_eig,
                     max_abs_diff, partial_trace, partial_transpose,
                     reorder_parties, tensor, tensor_power, von_neumann_entropy)
from .optimize import OptimizerBudget
from .quantum import (DEFAULT_MEASUREMENT_BUDGET, MeasuredRelEntropyResult, Povm,
                      measured_relative_entropy, n_copy_measured_relative_entropy,
                      povm_outcome_dist, quantum_confusion_probability,
                      quantum_relative_entropy)
from .ree import (DEFAULT_REE_BUDGET, ReeResult, entanglement_confusion_probability,
                  ree_oracle_bell_diagonal, relative_entropy_of_entanglement,
                  separable_candidate_sweep)
from .separable import (LocalChannel, PptReport, ProductTerm, SeparableEnsemble,
                        apply_channel_to_density, apply_local_channel,
                        assemble_density, bit_flip_ops, depolarizing_ops,
                        identity_channel, ppt_test, product_term,
                        random_local_channel, random_separable)
from .states import (basis_state, bell_minus, bell_plus, cc_mix, ghz,
                     maximally_mixed, random_density, random_pure_vector,
                     random_unitary, schmidt_pure, werner)

__version__ = "0.1.0"

__all__ = [
    "DIM_CAP",
    "DEFAULT_MEASUREMENT_BUDGET",
    "DEFAULT_REE_BUDGET",
    "ConfusionReport",
    "DensityMatrix",
    "DomainError",
    "HermitianEig",
    "LocalChannel",
    "MeasuredRelEntropyResult",
    "OptimizerBudget",
    "Povm",
    "PptReport",
    "ProbDist",
    "ProductTerm",
    "PureState",
    "ReeResult",
    "RelentError",
    "SeparableEnsemble",
    "UnsupportedConfigError",
    "ValidationError",
    "apply_channel_to_density",
    "apply_local_channel",
    "assemble_density",
    "basis_state",
    "bell_minus",
    "bell_plus",
    "binomial_exact_prob",
    "bit_flip_ops",
    "cc_mix",
    "confusion_probability",
    "depolarizing_ops",
    "entanglement_confusion_probability",
    "ghz",
    "herm_eig",
    "identity_channel",
    "kl_divergence",
    "max_abs_diff",
    "maximally_mixed",
    "measured_relative_entropy",
    "n_copy_measured_relative_entropy",
    "partial_trace",
    "partial_transpose",
    "povm_outcome_dist",
    "ppt_test",
    "product_term",
    "quantum_confusion_probability",
    "quantum_relative_entropy",
    "random_density",
    "random_local_channel",
    "random_pure_vector",
    "random_separable",
    "random_unitary",
    "ree_oracle_bell_diagonal",
    "relative_entropy_of_entanglement",
    "reorder_parties",
    "schmidt_pure",
    "separable_candidate_sweep",
    "simulate_inference",
    "stirling_exponent",
    "tensor",
    "tensor_power",
    "von_neumann_entropy",
    "werner",
]
