"""Hardware-efficient ansatz and the three-phase degradation protocol.

Parameters are a flat array of ``2 * layers * qubits`` angles.  Entry
``l * 2n + a * n + i`` is the angle on qubit ``i`` in layer ``l`` for axis
``a`` (0 = x, 1 = y).  With the defaults this is 32 angles.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .channels import DegradationChannel, apply_degradation_channel, fmt
from .coarse import ResourceMetrics, resource_metrics
from .qcore import DimensionMismatch, hermitian_eig
from .rng import Xoshiro256
from .tfim import TfimSpec, build_hamiltonian, energy_windows

N_QUBITS = 4
N_LAYERS = 4
TWO_PI = 2.0 * np.pi

TRACE_COLUMNS = ("k", "phase", "alpha", "cost", "s_vn", "s_obs", "c_rel", "d_rel", "o_c", "eta")


def param_index(layer: int, axis: str, qubit: int, n_qubits: int = N_QUBITS) -> int:
    return layer * 2 * n_qubits + {"x": 0, "y": 1}[axis] * n_qubits + qubit


def check_params(theta, n_qubits: int = N_QUBITS, n_layers: int = N_LAYERS) -> np.ndarray:
    t = np.asarray(theta, dtype=float).reshape(-1)
    if t.size != 2 * n_qubits * n_layers:
        raise ValueError(f"expected {2 * n_qubits * n_layers} parameters, got {t.size}")
    if not np.all(np.isfinite(t)):
        raise ValueError("parameters must be finite")
    return np.mod(t, TWO_PI)


# -- statevector gates (state kept as an n-axis tensor, qubit 0 first) ----


def _apply_1q(psi: np.ndarray, gate: np.ndarray, q: int) -> np.ndarray:
    psi = np.tensordot(gate, psi, axes=([1], [q]))
    return np.moveaxis(psi, 0, q)


def _apply_cx(psi: np.ndarray, control: int, target: int) -> np.ndarray:
    psi = psi.copy()
    idx = [slice(None)] * psi.ndim
    idx[control] = 1
    sub = psi[tuple(idx)]
    t_axis = target if target < control else target - 1
    psi[tuple(idx)] = np.flip(sub, axis=t_axis)
    return psi


def rx(angle: float) -> np.ndarray:
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def ry(angle: float) -> np.ndarray:
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


HADAMARD = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)


def prepare_state(theta, n_qubits: int = N_QUBITS, n_layers: int = N_LAYERS) -> np.ndarray:
    """Ansatz state: Hadamards on ``|0...0>``, then per layer Rx and Ry on
    every qubit followed by the CNOT chain ``CX(0,1) CX(1,2) ... CX(n-2,n-1)``."""
    t = check_params(theta, n_qubits, n_layers)
    psi = np.zeros((2,) * n_qubits, dtype=np.complex128)
    psi[(0,) * n_qubits] = 1.0
    for q in range(n_qubits):
        psi = _apply_1q(psi, HADAMARD, q)
    for layer in range(n_layers):
        for q in range(n_qubits):
            psi = _apply_1q(psi, rx(t[param_index(layer, "x", q, n_qubits)]), q)
            psi = _apply_1q(psi, ry(t[param_index(layer, "y", q, n_qubits)]), q)
        for q in range(n_qubits - 1):
            psi = _apply_cx(psi, q, q + 1)
    return psi.reshape(-1)


def cost(state, hamiltonian) -> float:
    """Energy ``<psi|H|psi>`` for a vector or ``Tr(rho H)`` for a density matrix."""
    h = np.asarray(hamiltonian)
    s = np.asarray(state, dtype=np.complex128)
    if s.shape[0] != h.shape[0]:
        raise DimensionMismatch(f"state has dim {s.shape[0]}, Hamiltonian has dim {h.shape[0]}")
    if s.ndim == 1:
        val = np.vdot(s, h @ s)
    else:
        val = np.sum(s * h.T)
    if abs(val.imag) > 1e-10:
        raise ValueError(f"energy has imaginary part {val.imag:.3g}")
    return float(val.real)


# -- protocol --------------------------------------------------------------


@dataclass(frozen=True)
class ProtocolConfig:
    total_iters: int = 150
    phase1_end: int = 30
    phase2_end: int = 60
    beta: float = 0.74
    seed: int = 0
    fraction: float = 0.3
    field_h: float = 1.0
    cost_on: str = "degraded"

    def __post_init__(self):
        if not 0 < self.phase1_end < self.phase2_end < self.total_iters:
            raise ValueError("need 0 < phase1_end < phase2_end < total_iters")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError(f"beta must lie in [0, 1], got {self.beta}")
        if self.cost_on not in ("degraded", "pure"):
            raise ValueError(f"cost_on must be 'degraded' or 'pure', got {self.cost_on!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @classmethod
    def from_dict(cls, obj: dict) -> "ProtocolConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(obj) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**obj)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def phase_of(k: int, cfg: ProtocolConfig) -> str:
    if k < cfg.phase1_end:
        return "I"
    if k < cfg.phase2_end:
        return "II"
    return "III"


def alpha_schedule(k: int, cfg: ProtocolConfig = ProtocolConfig()) -> float:
    """0 in phase I, 0.1 -> 0.4 across phase II, 0.4 -> 0.8 across phase III (capped)."""
    if k < cfg.phase1_end:
        return 0.0
    if k < cfg.phase2_end:
        return 0.1 + 0.3 * (k - cfg.phase1_end) / (cfg.phase2_end - cfg.phase1_end)
    return min(0.8, 0.4 + 0.4 * (k - cfg.phase2_end) / (cfg.total_iters - cfg.phase2_end))


def update_parameters(theta, k: int, cfg: ProtocolConfig, rng) -> np.ndarray:
    """One stochastic update, reduced mod 2 pi.

    ``rng.standard_normal(n)`` is called exactly once with ``n`` equal to the
    number of parameters; draws are used in parameter order.
    """
    t = np.asarray(theta, dtype=float)
    z = np.asarray(rng.standard_normal(t.size), dtype=float)
    s = np.sin(t)
    if k <= cfg.phase1_end:
        step = -0.05 * (0.1 * s + 0.05 * z)
    elif k <= cfg.phase2_end:
        p = (k - cfg.phase1_end) / (cfg.phase2_end - cfg.phase1_end)
        step = -0.03 * s * (1 - 0.5 * p) + 0.2 * p * (0.5 * z)
    else:
        p = (k - cfg.phase2_end) / (cfg.total_iters - cfg.phase2_end)
        step = -0.01 * s * (0.5 - 0.4 * p) + 0.5 * (1.0 * z)
    return np.mod(t + step, TWO_PI)


@dataclass(frozen=True)
class IterationRecord:
    k: int
    phase: str
    alpha: float
    cost: float
    metrics: ResourceMetrics

    def row(self) -> list[str]:
        m = self.metrics
        return [str(self.k), self.phase] + [
            fmt(v) for v in (self.alpha, self.cost, m.s_vn, m.s_obs, m.c_rel, m.d_rel, m.o_c, m.eta)
        ]


@dataclass
class RunTrace:
    config: ProtocolConfig
    records: list = field(default_factory=list)

    def column(self, name: str) -> np.ndarray:
        if name in ("k", "alpha", "cost"):
            return np.array([getattr(r, name) for r in self.records])
        return np.array([getattr(r.metrics, name) for r in self.records])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(TRACE_COLUMNS)
        for r in self.records:
            w.writerow(r.row())
        return buf.getvalue()


def read_trace_csv(path) -> dict[str, np.ndarray]:
    """Columns of a trace CSV (``phase`` kept as strings)."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows or set(TRACE_COLUMNS) - set(rows[0]):
        raise ValueError(f"{path}: not a trace CSV")
    out = {}
    for col in TRACE_COLUMNS:
        vals = [r[col] for r in rows]
        out[col] = np.array(vals) if col == "phase" else np.array(vals, dtype=float)
    return out


@dataclass(frozen=True)
class ProtocolSetup:
    hamiltonian: np.ndarray
    windows: object
    ground_state: np.ndarray


def setup(cfg: ProtocolConfig) -> ProtocolSetup:
    h = build_hamiltonian(TfimSpec(N_QUBITS, cfg.field_h))
    spectrum = hermitian_eig(h)
    win = energy_windows(spectrum, cfg.fraction)
    return ProtocolSetup(h, win, spectrum.eigenvectors[:, 0].copy())


def run_protocol(cfg: ProtocolConfig = ProtocolConfig()) -> RunTrace:
    """Run the degradation protocol for ``cfg.total_iters`` iterations.

    Each iteration prepares the ansatz state, degrades it with the channel
    at strength ``alpha_schedule(k)`` (reference state = TFIM ground state,
    coarse-graining = energy windows), records energy and resource metrics,
    then updates the parameters.  The first ``2 * 4 * 4`` uniforms of the
    seeded stream set the initial angles.
    """
    env = setup(cfg)
    cg = env.windows.coarse_graining
    rng = Xoshiro256(cfg.seed)
    theta = rng.uniform(0.0, TWO_PI, 2 * N_QUBITS * N_LAYERS)
    trace = RunTrace(cfg)
    for k in range(cfg.total_iters):
        psi = prepare_state(theta)
        pure = np.outer(psi, psi.conj())
        alpha = alpha_schedule(k, cfg)
        channel = DegradationChannel(alpha, cfg.beta, env.ground_state, cg)
        rho = apply_degradation_channel(pure, channel)
        energy = cost(rho if cfg.cost_on == "degraded" else psi, env.hamiltonian)
        trace.records.append(IterationRecord(k, phase_of(k, cfg), alpha, energy, resource_metrics(rho, cg)))
        theta = update_parameters(theta, k, cfg, rng)
    return trace


def load_config(path=None, **overrides) -> ProtocolConfig:
    obj = {}
    if path is not None:
        with open(path) as fh:
            obj = json.load(fh)
        if not isinstance(obj, dict):
            raise ValueError("config file must hold a JSON object")
    obj.update({k: v for k, v in overrides.items() if v is not None})
    return ProtocolConfig.from_dict(obj)
