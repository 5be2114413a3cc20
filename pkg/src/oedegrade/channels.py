"""Degradation channels and resource-transformation bookkeeping."""

from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import qcore
from .coarse import CoarseGraining, ResourceMetrics, block_dephase, resource_metrics
from .qcore import DimensionMismatch, QCoreError


class Severity(str, enum.Enum):
    NONE = "None"
    MINOR = "Minor"
    SIGNIFICANT = "Significant"
    SEVERE = "Severe"


def classify_severity(eta_drop: float) -> Severity:
    """Bucket a drop in resource purity: (0, 0.2) minor, [0.2, 0.4) significant, >= 0.4 severe."""
    if not np.isfinite(eta_drop):
        raise ValueError(f"eta drop must be finite, got {eta_drop}")
    if eta_drop <= 0:
        return Severity.NONE
    if eta_drop < 0.2:
        return Severity.MINOR
    if eta_drop < 0.4:
        return Severity.SIGNIFICANT
    return Severity.SEVERE


@dataclass(frozen=True)
class EpsilonChannel:
    """``rho -> (1 - eps) rho + eps |0><0|``."""

    epsilon: float

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon must lie in [0, 1], got {self.epsilon}")


def apply_epsilon_channel(rho, ch: EpsilonChannel | float) -> np.ndarray:
    """Partial reset towards basis state 0 (``|00>`` for two qubits)."""
    if not isinstance(ch, EpsilonChannel):
        ch = EpsilonChannel(float(ch))
    r = qcore.check_density_matrix(rho)
    out = (1.0 - ch.epsilon) * r
    out[0, 0] += ch.epsilon
    return out


@dataclass(frozen=True)
class DegradationChannel:
    """``rho -> (1 - alpha) rho + alpha [beta Delta(rho) + (1 - beta) sum_x P_x |psi0><psi0| P_x]``."""

    alpha: float
    beta: float
    reference_state: np.ndarray
    coarse_graining: CoarseGraining

    def __post_init__(self):
        for name in ("alpha", "beta"):
            val = getattr(self, name)
            if not 0.0 <= val <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {val}")
        psi = np.asarray(self.reference_state, dtype=np.complex128).reshape(-1)
        if psi.size != self.coarse_graining.dim:
            raise DimensionMismatch(
                f"reference state has dim {psi.size}, coarse-graining has dim {self.coarse_graining.dim}"
            )
        if abs(np.linalg.norm(psi) - 1.0) > 1e-12:
            raise QCoreError("reference state is not normalized")
        psi.flags.writeable = False
        object.__setattr__(self, "reference_state", psi)

    def projected_reference(self) -> np.ndarray:
        """``sum_x P_x |psi0><psi0| P_x``, the block-diagonal preparation."""
        ref = np.outer(self.reference_state, self.reference_state.conj())
        return sum(p @ ref @ p for p in self.coarse_graining.projectors)


def apply_degradation_channel(rho, ch: DegradationChannel) -> np.ndarray:
    r = qcore.check_density_matrix(rho)
    if r.shape[0] != ch.coarse_graining.dim:
        raise DimensionMismatch(f"state has dim {r.shape[0]}, channel acts on dim {ch.coarse_graining.dim}")
    if ch.alpha == 0.0:
        return r.copy()
    noisy = ch.beta * block_dephase(r, ch.coarse_graining) + (1.0 - ch.beta) * ch.projected_reference()
    out = (1.0 - ch.alpha) * r + ch.alpha * noisy
    return 0.5 * (out + out.conj().T)


@dataclass(frozen=True)
class PathwayDelta:
    d_c_rel: float
    d_d_rel: float
    d_o_c: float
    d_eta: float
    severity: Severity

    @property
    def eta_drop(self) -> float:
        return -self.d_eta


def pathway_delta(before: ResourceMetrics, after: ResourceMetrics) -> PathwayDelta:
    """Changes ``after - before``; severity is graded on the drop in eta."""
    d_eta = after.eta - before.eta
    return PathwayDelta(
        d_c_rel=after.c_rel - before.c_rel,
        d_d_rel=after.d_rel - before.d_rel,
        d_o_c=after.o_c - before.o_c,
        d_eta=d_eta,
        severity=classify_severity(max(-d_eta, 0.0)),
    )


# -- the two-qubit worked example ----------------------------------------


def worked_example_state() -> np.ndarray:
    """Two-qubit state with coherence between |00> and |11> (eigenvalues 5/8, 1/8, 1/8, 1/8)."""
    rho = np.zeros((4, 4), dtype=np.complex128)
    rho[0, 0] = 3 / 8
    rho[1, 1] = 1 / 8
    rho[2, 2] = 1 / 8
    rho[3, 3] = 3 / 8
    rho[0, 3] = rho[3, 0] = 1 / 4
    return rho


def worked_example_coarse_graining() -> CoarseGraining:
    """``{|00><00| + |01><01|, |10><10| + |11><11|}``."""
    return CoarseGraining.from_partition(4, [[0, 1], [2, 3]])


def epsilon_eigenvalues(eps: float) -> np.ndarray:
    """Closed-form spectrum of the reset channel applied to :func:`worked_example_state`."""
    root = np.sqrt(5 * eps**2 - 2 * eps + 1)
    return np.sort(
        np.array(
            [
                (1 - eps) / 8,
                (1 - eps) / 8,
                (3 + eps - 2 * root) / 8,
                (3 + eps + 2 * root) / 8,
            ]
        )
    )


# -- epsilon scan ----------------------------------------------------------

SCAN_COLUMNS = ("epsilon", "c_rel", "d_rel", "o_c", "eta", "d_c_rel", "d_d_rel", "d_o_c", "conversion_ratio")


@dataclass(frozen=True)
class ScanRow:
    epsilon: float
    c_rel: float
    d_rel: float
    o_c: float
    eta: float
    d_c_rel: float
    d_d_rel: float
    d_o_c: float
    conversion_ratio: float | None


def epsilon_scan(rho, cg: CoarseGraining, eps_grid: Sequence[float]) -> list[ScanRow]:
    """Metrics of the reset channel across ``eps_grid``.

    Deltas are measured against the unperturbed state (epsilon = 0).
    ``conversion_ratio = d_d_rel / |d_c_rel|`` and is ``None`` where
    ``|d_c_rel| <= 1e-12``.
    """
    grid = [float(e) for e in eps_grid]
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise ValueError("epsilon grid must be sorted ascending")
    base = resource_metrics(rho, cg)
    rows = []
    for eps in grid:
        m = resource_metrics(apply_epsilon_channel(rho, eps), cg)
        d = pathway_delta(base, m)
        ratio = d.d_d_rel / abs(d.d_c_rel) if abs(d.d_c_rel) > 1e-12 else None
        rows.append(ScanRow(eps, m.c_rel, m.d_rel, m.o_c, m.eta, d.d_c_rel, d.d_d_rel, d.d_o_c, ratio))
    return rows


OUTPUT_FLOOR = 1e-12


def snap(x: float) -> float:
    """Zero out magnitudes below ``1e-12`` (rounding noise) and negative zero."""
    x = float(x)
    return 0.0 if abs(x) < OUTPUT_FLOOR else x


def fmt(x: float | None) -> str:
    """12 significant digits, locale independent; ``None`` becomes empty.

    Magnitudes below ``1e-12`` are written as 0 so that last-bit noise
    does not leak into files compared across platforms.
    """
    if x is None:
        return ""
    return format(snap(x), ".12g")


def scan_to_csv(rows: Iterable[ScanRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SCAN_COLUMNS)
    for r in rows:
        w.writerow([fmt(getattr(r, c)) for c in SCAN_COLUMNS])
    return buf.getvalue()
