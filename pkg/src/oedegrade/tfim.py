"""Periodic transverse-field Ising chain and its energy-window coarse-graining.

Qubit 0 is the most significant bit of the computational-basis index.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .coarse import CoarseGraining
from .qcore import Spectrum, hermitian_eig

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]])
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]])

WINDOW_NAMES = ("low", "medium", "high")
DEGENERACY_TOL = 1e-9


class DegenerateSplit(ValueError):
    pass


@dataclass(frozen=True)
class TfimSpec:
    n_qubits: int = 4
    field_h: float = 1.0
    periodic: bool = True

    def __post_init__(self):
        if not 2 <= self.n_qubits <= 6:
            raise ValueError(f"n_qubits must be in 2..6, got {self.n_qubits}")
        if not self.periodic:
            raise ValueError("only periodic boundary conditions are supported")


def site_operator(op: np.ndarray, site: int, n: int) -> np.ndarray:
    return reduce(np.kron, [op if j == site else np.eye(2) for j in range(n)])


def build_hamiltonian(spec: TfimSpec = TfimSpec()) -> np.ndarray:
    """``H = -sum_i Z_i Z_{i+1} - h sum_i X_i`` with ``Z_n = Z_0``."""
    n = spec.n_qubits
    dim = 2**n
    h = np.zeros((dim, dim))
    for i in range(n):
        h -= site_operator(PAULI_Z, i, n) @ site_operator(PAULI_Z, (i + 1) % n, n)
        h -= spec.field_h * site_operator(PAULI_X, i, n)
    return h.astype(np.complex128)


@dataclass(frozen=True)
class EnergyWindows:
    fraction: float
    labels: tuple  # window name per eigen-index
    names: tuple  # window name per coarse-graining block
    low_threshold: float
    high_threshold: float
    coarse_graining: CoarseGraining

    def indices(self, name: str) -> list[int]:
        return [i for i, lab in enumerate(self.labels) if lab == name]

    def projector(self, name: str) -> np.ndarray:
        return self.coarse_graining.projectors[self.names.index(name)]


def _clusters(energies: np.ndarray) -> list[list[int]]:
    groups = [[0]]
    for i in range(1, len(energies)):
        if energies[i] - energies[i - 1] <= DEGENERACY_TOL:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def energy_windows(spectrum: Spectrum, fraction: float = 0.3, strict: bool = False) -> EnergyWindows:
    """Split the eigenbasis into low / medium / high energy windows.

    low: ``E < E_min + f dE``; high: ``E > E_max - f dE``; medium: the rest,
    where ``dE = E_max - E_min``.  Degenerate eigenvalues (within 1e-9) are
    placed together according to their mean energy.  With ``strict=True`` a
    degenerate group whose members would fall on different sides of a
    threshold raises :class:`DegenerateSplit` instead.  Empty windows are
    left out of the coarse-graining.
    """
    if not 0.0 < fraction < 0.5:
        raise ValueError(f"fraction must lie in (0, 0.5), got {fraction}")
    e = np.asarray(spectrum.eigenvalues, dtype=float)
    vecs = np.asarray(spectrum.eigenvectors)
    e_min, e_max = float(e[0]), float(e[-1])
    spread = e_max - e_min
    lo = e_min + fraction * spread
    hi = e_max - fraction * spread

    def label(x):
        if x < lo:
            return "low"
        if x > hi:
            return "high"
        return "medium"

    labels = [""] * len(e)
    for group in _clusters(e):
        members = {label(e[i]) for i in group}
        if strict and len(members) > 1:
            raise DegenerateSplit(f"degenerate eigenvalues {e[group]} straddle a window threshold")
        lab = label(float(np.mean(e[group])))
        for i in group:
            labels[i] = lab

    names, bases = [], []
    for name in WINDOW_NAMES:
        idx = [i for i, lab in enumerate(labels) if lab == name]
        if idx:
            names.append(name)
            bases.append(vecs[:, idx])
    return EnergyWindows(
        fraction=fraction,
        labels=tuple(labels),
        names=tuple(names),
        low_threshold=lo,
        high_threshold=hi,
        coarse_graining=CoarseGraining.from_bases(bases),
    )


def diagonalize(spec: TfimSpec = TfimSpec()) -> Spectrum:
    return hermitian_eig(build_hamiltonian(spec))


def spectrum_report(spec: TfimSpec = TfimSpec(), fraction: float = 0.3) -> dict:
    spectrum = diagonalize(spec)
    win = energy_windows(spectrum, fraction)
    return {
        "eigenvalues": [float(x) for x in spectrum.eigenvalues],
        "windows": {name: win.indices(name) for name in WINDOW_NAMES},
    }
