import numpy as np
import pytest

from oedegrade import qcore, tfim
from oedegrade.qcore import Spectrum
from oedegrade.tfim import TfimSpec
from oracles import tfim_dense


def test_classical_ground_energy():
    h = tfim.build_hamiltonian(TfimSpec(4, 0.0))
    w, v = qcore.hermitian_eig(h)
    assert abs(w[0] + 4.0) <= 1e-10
    assert abs(w[1] + 4.0) <= 1e-10
    ground = v[:, :2]
    # the ground space is spanned by |0000> and |1111>
    assert np.allclose(np.abs(ground[[0, 15]]) ** 2 @ np.ones(2), [1, 1], atol=1e-12)


def test_two_site_chain():
    w = qcore.hermitian_eig(tfim.build_hamiltonian(TfimSpec(2, 0.0))).eigenvalues
    assert np.allclose(w, [-2, -2, 2, 2], atol=1e-14)


@pytest.mark.parametrize("n, h", [(2, 0.7), (3, 1.0), (4, 1.0), (4, 0.3), (5, 2.0)])
def test_hamiltonian_matches_bitwise_oracle(n, h):
    H = tfim.build_hamiltonian(TfimSpec(n, h))
    assert H.dtype == np.complex128
    assert np.array_equal(H.real, tfim_dense(n, h))
    assert not np.any(H.imag)


def test_spectrum_matches_lapack():
    w = tfim.diagonalize(TfimSpec(4, 1.0)).eigenvalues
    assert np.max(np.abs(w - np.linalg.eigvalsh(tfim_dense(4, 1.0)))) <= 1e-9
    assert w[0] == pytest.approx(-5.226251859505506, abs=1e-12)


def test_spec_validation():
    with pytest.raises(ValueError):
        TfimSpec(1)
    with pytest.raises(ValueError):
        TfimSpec(7)
    with pytest.raises(ValueError):
        TfimSpec(4, 1.0, periodic=False)


def test_window_ranks_match_threshold_counts():
    spec = TfimSpec(4, 1.0)
    win = tfim.energy_windows(tfim.diagonalize(spec), 0.3)
    e = np.linalg.eigvalsh(tfim_dense(4, 1.0))
    lo = e[0] + 0.3 * (e[-1] - e[0])
    hi = e[-1] - 0.3 * (e[-1] - e[0])
    counts = {"low": int(np.sum(e < lo)), "high": int(np.sum(e > hi))}
    counts["medium"] = 16 - counts["low"] - counts["high"]
    assert win.names == ("low", "medium", "high")
    assert dict(zip(win.names, win.coarse_graining.volumes)) == counts == {"low": 3, "medium": 10, "high": 3}
    assert win.low_threshold == pytest.approx(lo, abs=1e-9)


@pytest.mark.parametrize("n, h, f", [(4, 1.0, 0.3), (3, 0.5, 0.2), (5, 1.5, 0.45), (4, 0.0, 0.3)])
def test_windows_commute_and_complete(n, h, f):
    H = tfim.build_hamiltonian(TfimSpec(n, h))
    win = tfim.energy_windows(qcore.hermitian_eig(H), f)
    projs = win.coarse_graining.projectors
    for p in projs:
        assert np.max(np.abs(p @ H - H @ p)) <= 1e-8
    assert np.max(np.abs(sum(projs) - np.eye(2**n))) <= 1e-10
    assert sum(win.coarse_graining.volumes) == 2**n


def test_ground_state_in_low_window():
    spectrum = tfim.diagonalize()
    win = tfim.energy_windows(spectrum)
    e0 = spectrum.eigenvectors[:, 0]
    assert np.linalg.norm(win.projector("low") @ e0 - e0) <= 1e-9


def test_flat_spectrum_single_window():
    spectrum = Spectrum(np.full(4, 2.5), np.eye(4, dtype=complex))
    win = tfim.energy_windows(spectrum)
    assert win.names == ("medium",)
    assert win.coarse_graining.volumes == (4,)


def _synthetic(energies):
    return Spectrum(np.asarray(energies, dtype=float), np.eye(len(energies), dtype=complex))


def test_degenerate_group_assigned_by_mean():
    # thresholds at 0.3 and 0.7; the pair straddles 0.3 by less than the tolerance
    spec = _synthetic([0.0, 0.3 - 4e-10, 0.3 + 4e-10, 0.5, 1.0])
    win = tfim.energy_windows(spec, 0.3)
    assert win.labels[1] == win.labels[2] == "medium"
    with pytest.raises(tfim.DegenerateSplit):
        tfim.energy_windows(spec, 0.3, strict=True)


def test_value_on_threshold_goes_to_medium():
    win = tfim.energy_windows(_synthetic([0.0, 0.25, 0.5, 0.75, 1.0]), 0.25)
    assert win.labels == ("low", "medium", "medium", "medium", "high")


def test_fraction_validated():
    with pytest.raises(ValueError):
        tfim.energy_windows(tfim.diagonalize(), 0.5)


def test_spectrum_report():
    rep = tfim.spectrum_report()
    assert len(rep["eigenvalues"]) == 16
    assert rep["windows"] == {"low": [0, 1, 2], "medium": list(range(3, 13)), "high": [13, 14, 15]}
