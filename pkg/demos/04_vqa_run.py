"""
One run of the degradation protocol
===================================

A 32-parameter ansatz is updated for 150 iterations while the degradation
strength alpha ramps up. Each iterate is measured against the energy-window
coarse-graining and the resource metrics are recorded.
"""

import numpy as np

from oedegrade import cli, vqa

cfg = vqa.ProtocolConfig(seed=0)
trace = vqa.run_protocol(cfg)

eta = trace.column("eta")
cost = trace.column("cost")
for k in (0, 30, 60, 90, 120, 149):
    print(f"k={k:3d}  phase={vqa.phase_of(k, cfg):3s}  alpha={trace.column('alpha')[k]:.3f}  cost={cost[k]:+.4f}  eta={eta[k]:.4f}")

# Correlation between C_rel and D_rel inside the default window 31..149
print(cli.run_summary(trace))

# Average step size of the cost early and late in the run
step = np.abs(np.diff(cost))
print(f"early {step[:29].mean():.2e}   late {step[119:149].mean():.2e}")
