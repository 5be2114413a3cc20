"""Observational-entropy resource diagnostics and degradation channels.

Submodules: ``qcore`` (Hermitian eigensolver, entropies), ``coarse``
(coarse-grainings and the resource metrics), ``channels`` (degradation
channels and severity), ``tfim`` (Ising Hamiltonian, energy windows),
``vqa`` (ansatz and degradation protocol), ``stats`` (correlation
statistics), ``rng`` (portable seeded stream) and ``cli``.
"""

from .channels import (
    DegradationChannel,
    EpsilonChannel,
    Severity,
    apply_degradation_channel,
    apply_epsilon_channel,
    classify_severity,
    epsilon_scan,
    pathway_delta,
)
from .coarse import CoarseGraining, ResourceMetrics, observational_entropy, resource_metrics
from .qcore import hermitian_eig, relative_entropy, von_neumann_entropy
from .rng import Xoshiro256
from .stats import ensemble_summary, fisher_ci, pearson
from .tfim import TfimSpec, build_hamiltonian, energy_windows
from .vqa import ProtocolConfig, prepare_state, run_protocol

__version__ = "0.1.0"

__all__ = [
    "CoarseGraining",
    "DegradationChannel",
    "EpsilonChannel",
    "ProtocolConfig",
    "ResourceMetrics",
    "Severity",
    "TfimSpec",
    "Xoshiro256",
    "apply_degradation_channel",
    "apply_epsilon_channel",
    "build_hamiltonian",
    "classify_severity",
    "energy_windows",
    "ensemble_summary",
    "epsilon_scan",
    "fisher_ci",
    "hermitian_eig",
    "observational_entropy",
    "pathway_delta",
    "pearson",
    "prepare_state",
    "relative_entropy",
    "resource_metrics",
    "run_protocol",
    "von_neumann_entropy",
]
