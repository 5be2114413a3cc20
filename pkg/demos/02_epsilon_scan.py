"""
Scanning the reset strength
===========================
"""

import numpy as np

from oedegrade import channels

rows = channels.epsilon_scan(
    channels.worked_example_state(),
    channels.worked_example_coarse_graining(),
    np.linspace(0, 0.5, 101),
)

# eta falls steadily while O_C barely moves
for r in rows[::10]:
    ratio = "" if r.conversion_ratio is None else f"{r.conversion_ratio:.4f}"
    print(f"{r.epsilon:5.3f}  O_C={r.o_c:.5f}  eta={r.eta:.5f}  D/C ratio={ratio}")

# The same table as CSV, the format written by `oedegrade scan-epsilon`
print(channels.scan_to_csv(rows[:3]))
