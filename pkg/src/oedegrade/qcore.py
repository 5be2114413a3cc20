"""Dense Hermitian linear algebra and entropy primitives.

Everything here works on plain ``numpy`` arrays of dtype ``complex128``.
Entropies are in bits.  Matrices are assumed small (dimension <= 64).
"""

from __future__ import annotations

import json
from typing import NamedTuple

import numpy as np

MAX_DIM = 64
HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-10
KERNEL_TOL = 1e-12
SUPPORT_TOL = 1e-9
JACOBI_TOL = 1e-13
MAX_SWEEPS = 100


class QCoreError(ValueError):
    """Base class for invalid numerical input."""


class NonHermitianInput(QCoreError):
    pass


class InvalidState(QCoreError):
    pass


class SupportViolation(QCoreError):
    pass


class DimensionMismatch(QCoreError):
    pass


class ConvergenceError(RuntimeError):
    pass


class Spectrum(NamedTuple):
    """Ascending eigenvalues and the matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise QCoreError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] < 1 or m.shape[0] > MAX_DIM:
        raise QCoreError(f"dimension {m.shape[0]} outside 1..{MAX_DIM}")
    if not np.all(np.isfinite(m)):
        raise QCoreError("matrix has non-finite entries")
    return m


def hermiticity_error(a: np.ndarray) -> float:
    return float(np.max(np.abs(a - a.conj().T)))


def check_density_matrix(rho) -> np.ndarray:
    """Validate Hermiticity and unit trace and return ``rho`` as complex128.

    Positivity is not checked here since it needs a diagonalization; the
    entropy functions check it when they have the eigenvalues anyway.  Use
    :func:`is_density_matrix` for the full check.
    """
    m = as_matrix(rho)
    err = hermiticity_error(m)
    if err > HERMITIAN_TOL:
        raise InvalidState(f"state is not Hermitian (max |A - A^H| = {err:.3g})")
    tr = np.trace(m)
    if abs(tr - 1.0) > TRACE_TOL:
        raise InvalidState(f"trace {tr.real:.12g} differs from 1")
    return m


def is_density_matrix(rho) -> bool:
    try:
        m = check_density_matrix(rho)
    except QCoreError:
        return False
    return bool(hermitian_eig(m).eigenvalues[0] >= -PSD_TOL)


def _round_robin(m: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Pairings for one cyclic sweep of ``m`` (even) indices.

    Each round contains ``m / 2`` disjoint pairs, so the rotations of a round
    commute and can be applied together.  Every unordered pair appears in
    exactly one round.
    """
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        top = players[: m // 2]
        bot = players[m // 2 :][::-1]
        p = np.array([min(a, b) for a, b in zip(top, bot)])
        q = np.array([max(a, b) for a, b in zip(top, bot)])
        rounds.append((p, q))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


_ROUNDS_CACHE: dict[int, list[tuple[np.ndarray, np.ndarray]]] = {}


def _off_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.sqrt(np.sum(off.real**2 + off.imag**2)))


def hermitian_eig(h) -> Spectrum:
    """Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.

    The sweep order is fixed (round-robin pairing), so results are
    reproducible for a given input.  Iteration stops once the off-diagonal
    Frobenius norm drops below ``1e-13`` (relative to the matrix norm when
    that exceeds one).  Eigenvalues come back ascending; each eigenvector is
    phase-fixed so that its largest-magnitude component is real and positive.

    Raises
    ------
    NonHermitianInput
        If ``max |H - H^H| > 1e-10``.
    """
    a = as_matrix(h)
    err = hermiticity_error(a)
    if err > HERMITIAN_TOL:
        raise NonHermitianInput(f"matrix is not Hermitian (max |A - A^H| = {err:.3g})")
    n = a.shape[0]
    a = 0.5 * (a + a.conj().T)
    v = np.eye(n, dtype=np.complex128)

    if n > 1:
        m = n + (n % 2)
        if m not in _ROUNDS_CACHE:
            _ROUNDS_CACHE[m] = _round_robin(m)
        rounds = _ROUNDS_CACHE[m]
        if m != n:
            # drop pairs involving the padding index
            rounds = [(p[q < n], q[q < n]) for p, q in rounds]
        tol = JACOBI_TOL * max(1.0, float(np.linalg.norm(a)))
        for _ in range(MAX_SWEEPS):
            if _off_norm(a) <= tol:
                break
            for p, q in rounds:
                apq = a[p, q]
                mag = np.abs(apq)
                live = mag > 1e-300
                if not np.any(live):
                    continue
                p, q, apq, mag = p[live], q[live], apq[live], mag[live]
                phase = apq / mag
                zeta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                t = np.where(zeta >= 0, 1.0, -1.0) / (np.abs(zeta) + np.hypot(1.0, zeta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                j = np.eye(n, dtype=np.complex128)
                j[p, p] = c
                j[p, q] = s
                j[q, p] = -s * phase.conj()
                j[q, q] = c * phase.conj()
                a = j.conj().T @ a @ j
                a[p, q] = 0.0
                a[q, p] = 0.0
                v = v @ j
        else:
            raise ConvergenceError(f"Jacobi did not converge in {MAX_SWEEPS} sweeps")

    w = np.diag(a).real.copy()
    order = np.argsort(w, kind="stable")
    w = w[order]
    v = v[:, order]
    idx = np.argmax(np.abs(v), axis=0)
    lead = v[idx, np.arange(n)]
    v = v * (np.abs(lead) / lead)[None, :]
    return Spectrum(w, v)


def _entropy_from_eigenvalues(w: np.ndarray) -> float:
    if np.any(w < -PSD_TOL):
        raise InvalidState(f"negative eigenvalue {w.min():.3g}")
    w = w[w > 0]
    return float(-np.sum(w * np.log2(w))) + 0.0  # no negative zero


def von_neumann_entropy(rho) -> float:
    """``S(rho) = -Tr rho log2 rho`` in bits, with ``0 log 0 = 0``.

    Eigenvalues in ``[-1e-10, 0)`` are treated as zero; anything more
    negative raises :class:`InvalidState`.
    """
    m = check_density_matrix(rho)
    return _entropy_from_eigenvalues(hermitian_eig(m).eigenvalues)


def relative_entropy(rho, sigma) -> float:
    """Quantum relative entropy ``D(rho || sigma)`` in bits.

    Eigenvalues of ``sigma`` below ``1e-12`` define its kernel.  If ``rho``
    puts more than ``1e-9`` weight there the divergence is infinite and
    :class:`SupportViolation` is raised.
    """
    r = check_density_matrix(rho)
    s = check_density_matrix(sigma)
    if r.shape != s.shape:
        raise DimensionMismatch(f"shapes {r.shape} and {s.shape} differ")
    lam = hermitian_eig(r).eigenvalues
    mu, w = hermitian_eig(s)
    if mu[0] < -PSD_TOL:
        raise InvalidState(f"sigma has negative eigenvalue {mu[0]:.3g}")
    # diagonal of rho in sigma's eigenbasis
    weights = np.einsum("ij,ik,kj->j", w.conj(), r, w).real
    kernel = mu < KERNEL_TOL
    leak = float(np.sum(weights[kernel]))
    if leak > SUPPORT_TOL:
        raise SupportViolation(f"rho has weight {leak:.3g} on the kernel of sigma")
    cross = float(np.sum(weights[~kernel] * np.log2(mu[~kernel])))
    d = -_entropy_from_eigenvalues(lam) - cross
    if -1e-12 < d < 0:
        d = 0.0
    return d


def pure_density(psi) -> np.ndarray:
    v = np.asarray(psi, dtype=np.complex128).reshape(-1)
    norm = np.linalg.norm(v)
    if abs(norm - 1.0) > 1e-12:
        raise InvalidState(f"state vector norm {norm:.15g} is not 1")
    return np.outer(v, v.conj())


# -- random sampling (seeded, used by property tests and demos) -----------


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))[None, :]


def random_density_matrix(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Ginibre ensemble ``G G^H / Tr``; ``rank`` defaults to full."""
    k = dim if rank is None else rank
    g = rng.standard_normal((dim, k)) + 1j * rng.standard_normal((dim, k))
    rho = g @ g.conj().T
    rho = rho / np.trace(rho).real
    return 0.5 * (rho + rho.conj().T)


def random_pure_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    return random_unitary(dim, rng)[:, 0]


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return 0.5 * (g + g.conj().T)


# -- serialization --------------------------------------------------------


def matrix_to_dict(a) -> dict:
    m = as_matrix(a)
    flat = m.reshape(-1)
    return {"dim": int(m.shape[0]), "re": flat.real.tolist(), "im": flat.imag.tolist()}


def matrix_from_dict(obj: dict) -> np.ndarray:
    try:
        d = int(obj["dim"])
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", [0.0] * (d * d)), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise QCoreError(f"malformed matrix object: {exc}") from None
    if re.size != d * d or im.size != d * d:
        raise QCoreError(f"expected {d * d} entries for dim {d}")
    return as_matrix((re + 1j * im).reshape(d, d))


def dump_matrix(a, path) -> None:
    with open(path, "w") as fh:
        json.dump(matrix_to_dict(a), fh)


def load_matrix(path) -> np.ndarray:
    with open(path) as fh:
        return matrix_from_dict(json.load(fh))
