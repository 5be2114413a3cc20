"""
Energy windows of the four-site Ising ring
==========================================

The transverse-field Ising ring at h = 1 has 16 levels. The lowest and
highest 30 percent of the energy range define the low and high windows, the
rest is the medium window. Each window projector commutes with H.
"""

import numpy as np

from oedegrade import tfim
from oedegrade.tfim import TfimSpec

spec = TfimSpec(4, 1.0)
H = tfim.build_hamiltonian(spec)
spectrum = tfim.diagonalize(spec)
print(np.round(spectrum.eigenvalues, 4))

win = tfim.energy_windows(spectrum, 0.3)
for name in win.names:
    p = win.projector(name)
    print(f"{name:6s} size {len(win.indices(name)):2d}   ||[P, H]|| = {np.abs(p @ H - H @ p).max():.1e}")

# At h = 0 the ground energy is -n
print(tfim.diagonalize(TfimSpec(4, 0.0)).eigenvalues[0])
