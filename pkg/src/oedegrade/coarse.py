"""Coarse-grainings, observational entropy and its coherence/noise split.

A coarse-graining is a complete set of orthogonal projectors.  For a state
``rho`` it defines

* observational entropy ``S_C = -sum_x p_x log2(p_x / V_x)``,
* total inconsistency ``O_C = S_C - S(rho)``,
* inter-block coherence ``C_rel = S(Delta rho) - S(rho)``,
* intra-block noise ``D_rel = sum_x p_x D(rho_x || kappa_x)``,

with ``O_C = C_rel + D_rel`` and resource purity ``eta = C_rel / O_C``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import qcore
from .qcore import DimensionMismatch, QCoreError

PROJECTOR_TOL = 1e-10
EMPTY_BLOCK = 1e-12
ETA_ZERO = 1e-12


class CoarseGrainingError(QCoreError):
    pass


class NotProjector(CoarseGrainingError):
    pass


class NotOrthogonal(CoarseGrainingError):
    pass


class NotComplete(CoarseGrainingError):
    pass


@dataclass(frozen=True)
class CoarseGraining:
    """Validated projective coarse-graining.

    ``bases[x]`` is a ``dim x V_x`` isometry whose columns span block ``x``;
    ``projectors[x] = bases[x] @ bases[x]^H``.
    """

    dim: int
    projectors: tuple
    bases: tuple
    volumes: tuple

    def __len__(self):
        return len(self.projectors)

    @classmethod
    def from_bases(cls, bases: Sequence) -> "CoarseGraining":
        """Build from orthonormal block bases (each ``dim x V_x``)."""
        mats = [np.asarray(b, dtype=np.complex128) for b in bases]
        projectors = [b @ b.conj().T for b in mats]
        cg = validate_coarse_graining(projectors, _bases=mats)
        return cg

    @classmethod
    def from_partition(cls, dim: int, blocks: Sequence[Sequence[int]]) -> "CoarseGraining":
        """Coarse-graining by groups of computational basis states."""
        eye = np.eye(dim, dtype=np.complex128)
        return cls.from_bases([eye[:, list(b)] for b in blocks])

    def rotated(self, u) -> "CoarseGraining":
        """Coarse-graining ``{U P_x U^H}``."""
        u = np.asarray(u, dtype=np.complex128)
        return CoarseGraining.from_bases([u @ b for b in self.bases])

    def kappa(self, x: int) -> np.ndarray:
        """Maximally mixed state on block ``x``."""
        return self.projectors[x] / self.volumes[x]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.complex128)
    a.flags.writeable = False
    return a


def validate_coarse_graining(projectors: Sequence, _bases: Sequence | None = None) -> CoarseGraining:
    """Check that ``projectors`` form a complete orthogonal set.

    Raises :class:`NotProjector`, :class:`NotOrthogonal` or
    :class:`NotComplete`, naming the offending index (or index pair).
    """
    if len(projectors) == 0:
        raise CoarseGrainingError("empty list of projectors")
    mats = [qcore.as_matrix(p) for p in projectors]
    dim = mats[0].shape[0]
    for i, p in enumerate(mats):
        if p.shape != (dim, dim):
            raise DimensionMismatch(f"projector {i} has shape {p.shape}, expected {(dim, dim)}")
        herm = qcore.hermiticity_error(p)
        idem = float(np.max(np.abs(p @ p - p)))
        if herm > PROJECTOR_TOL or idem > PROJECTOR_TOL:
            raise NotProjector(f"projector {i} is not an orthogonal projector (herm {herm:.3g}, idem {idem:.3g})")
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            overlap = float(np.max(np.abs(mats[i] @ mats[j])))
            if overlap > PROJECTOR_TOL:
                raise NotOrthogonal(f"projectors {i} and {j} overlap (max |P_i P_j| = {overlap:.3g})")
    total = sum(mats)
    gap = float(np.max(np.abs(total - np.eye(dim))))
    if gap > PROJECTOR_TOL:
        raise NotComplete(f"projectors 0..{len(mats) - 1} do not sum to identity (gap {gap:.3g})")
    volumes = []
    for i, p in enumerate(mats):
        v = int(round(np.trace(p).real))
        if v < 1:
            raise NotProjector(f"projector {i} has rank 0")
        volumes.append(v)
    if _bases is None:
        bases = []
        for p, v in zip(mats, volumes):
            _, vecs = qcore.hermitian_eig(p)
            bases.append(vecs[:, -v:])
    else:
        bases = list(_bases)
    return CoarseGraining(
        dim=dim,
        projectors=tuple(_frozen(p) for p in mats),
        bases=tuple(_frozen(b) for b in bases),
        volumes=tuple(volumes),
    )


def _check_dims(rho: np.ndarray, cg: CoarseGraining) -> None:
    if rho.shape[0] != cg.dim:
        raise DimensionMismatch(f"state has dim {rho.shape[0]}, coarse-graining has dim {cg.dim}")


def block_probabilities(rho, cg: CoarseGraining) -> np.ndarray:
    r = qcore.check_density_matrix(rho)
    _check_dims(r, cg)
    # Tr(P rho) without forming the product
    return np.array([np.sum(p * r.T).real for p in cg.projectors])


def block_dephase(rho, cg: CoarseGraining) -> np.ndarray:
    """``Delta(rho) = sum_x P_x rho P_x``."""
    r = qcore.check_density_matrix(rho)
    _check_dims(r, cg)
    out = sum(p @ r @ p for p in cg.projectors)
    return 0.5 * (out + out.conj().T)


def block_analysis(rho, cg: CoarseGraining) -> list[tuple[float, np.ndarray | None]]:
    """Per-block ``(p_x, rho_x)``; ``rho_x`` is ``None`` when ``p_x <= 1e-12``."""
    r = qcore.check_density_matrix(rho)
    _check_dims(r, cg)
    out = []
    for p_x, proj in zip(block_probabilities(r, cg), cg.projectors):
        if p_x <= EMPTY_BLOCK:
            out.append((float(p_x), None))
            continue
        rx = proj @ r @ proj / p_x
        out.append((float(p_x), 0.5 * (rx + rx.conj().T)))
    return out


def _observational_entropy(probs: np.ndarray, volumes) -> float:
    s = 0.0
    for p, v in zip(probs, volumes):
        if p > EMPTY_BLOCK:
            s -= p * np.log2(p / v)
    return float(s)


def observational_entropy(rho, cg: CoarseGraining) -> float:
    """``S_C(rho) = -sum_x p_x log2(p_x / V_x)``; empty blocks contribute 0."""
    return _observational_entropy(block_probabilities(rho, cg), cg.volumes)


@dataclass(frozen=True)
class ResourceMetrics:
    s_vn: float
    s_obs: float
    c_rel: float
    d_rel: float
    o_c: float
    eta: float

    def as_dict(self) -> dict:
        return {
            "s_vn": self.s_vn,
            "s_obs": self.s_obs,
            "c_rel": self.c_rel,
            "d_rel": self.d_rel,
            "o_c": self.o_c,
            "eta": self.eta,
        }


def resource_purity(c_rel: float, o_c: float) -> float:
    """``C_rel / O_C``, defined as 0 when ``O_C <= 1e-12``."""
    if o_c <= ETA_ZERO:
        return 0.0
    return c_rel / o_c


def resource_metrics(rho, cg: CoarseGraining) -> ResourceMetrics:
    """Full metric bundle for ``rho`` against ``cg``.

    Block quantities are evaluated in each block's own basis (``W_x^H rho
    W_x``), which gives the same spectra as the full-space projected
    operators at a fraction of the cost.
    """
    r = qcore.check_density_matrix(rho)
    _check_dims(r, cg)
    s_vn = qcore.von_neumann_entropy(r)
    probs = block_probabilities(r, cg)
    s_dephased = 0.0
    d_rel = 0.0
    for p_x, w, v in zip(probs, cg.bases, cg.volumes):
        if p_x <= EMPTY_BLOCK:
            continue
        blk = w.conj().T @ r @ w
        blk = 0.5 * (blk + blk.conj().T)
        lam = qcore.hermitian_eig(blk).eigenvalues
        lam = np.clip(lam, 0.0, None)
        nz = lam[lam > 0]
        s_dephased -= float(np.sum(nz * np.log2(nz)))
        # Delta(rho) restricted to block x is p_x * rho_x
        d_rel += float(p_x) * qcore.relative_entropy(blk / np.trace(blk).real, np.eye(v) / v)
    s_obs = _observational_entropy(probs, cg.volumes)
    c_rel = s_dephased - s_vn
    o_c = s_obs - s_vn
    return ResourceMetrics(
        s_vn=s_vn,
        s_obs=s_obs,
        c_rel=c_rel,
        d_rel=d_rel,
        o_c=o_c,
        eta=resource_purity(c_rel, o_c),
    )


def block_offdiagonal_norm(rho, cg: CoarseGraining) -> float:
    """Largest entry of ``rho - Delta(rho)``."""
    r = qcore.as_matrix(rho)
    return float(np.max(np.abs(r - sum(p @ r @ p for p in cg.projectors))))


def block_uniform_state(cg: CoarseGraining, probs: Sequence[float]) -> np.ndarray:
    """``sum_x (p_x / V_x) P_x``, the states with ``O_C = 0``."""
    return sum(p / v * proj for p, v, proj in zip(probs, cg.volumes, cg.projectors))


def random_coarse_graining(
    dim: int, rng: np.random.Generator, blocks: Sequence[Sequence[int]] | None = None
) -> CoarseGraining:
    """Haar-rotated partition of the computational basis (halves by default)."""
    if blocks is None:
        blocks = [range(dim // 2), range(dim // 2, dim)]
    return CoarseGraining.from_partition(dim, blocks).rotated(qcore.random_unitary(dim, rng))


# -- serialization --------------------------------------------------------


def coarse_graining_to_dict(cg: CoarseGraining, explicit: bool = True) -> dict:
    """JSON form.  ``blocks`` lists basis-column indices; the basis itself is
    stored in ``basis`` (qcore matrix format) unless it is the identity."""
    blocks, start = [], 0
    for v in cg.volumes:
        blocks.append(list(range(start, start + v)))
        start += v
    out = {"dim": cg.dim, "blocks": blocks}
    basis = np.hstack(cg.bases)
    if not np.allclose(basis, np.eye(cg.dim), atol=0, rtol=0):
        out["basis"] = qcore.matrix_to_dict(basis)
    if explicit:
        out["projectors"] = [qcore.matrix_to_dict(p) for p in cg.projectors]
    return out


def coarse_graining_from_dict(obj: dict) -> CoarseGraining:
    """Inverse of :func:`coarse_graining_to_dict`.

    ``blocks`` index columns of ``basis`` (identity when absent).  If only
    ``projectors`` is given, they are validated directly.
    """
    if "blocks" in obj:
        dim = int(obj["dim"])
        basis = qcore.matrix_from_dict(obj["basis"]) if "basis" in obj else np.eye(dim, dtype=np.complex128)
        if basis.shape[0] != dim:
            raise DimensionMismatch(f"basis has dim {basis.shape[0]}, expected {dim}")
        if np.max(np.abs(basis.conj().T @ basis - np.eye(dim))) > PROJECTOR_TOL:
            raise CoarseGrainingError("basis columns are not orthonormal")
        cg = CoarseGraining.from_bases([basis[:, list(b)] for b in obj["blocks"]])
        if "projectors" in obj:
            given = [qcore.matrix_from_dict(p) for p in obj["projectors"]]
            if len(given) != len(cg) or any(
                np.max(np.abs(g - p)) > PROJECTOR_TOL for g, p in zip(given, cg.projectors)
            ):
                raise CoarseGrainingError("explicit projectors disagree with blocks")
        return cg
    if "projectors" in obj:
        return validate_coarse_graining([qcore.matrix_from_dict(p) for p in obj["projectors"]])
    raise CoarseGrainingError("coarse-graining needs 'blocks' or 'projectors'")


def load_coarse_graining(path) -> CoarseGraining:
    with open(path) as fh:
        return coarse_graining_from_dict(json.load(fh))


def dump_coarse_graining(cg: CoarseGraining, path, explicit: bool = True) -> None:
    with open(path, "w") as fh:
        json.dump(coarse_graining_to_dict(cg, explicit=explicit), fh, indent=1)
