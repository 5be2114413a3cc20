"""
Ensemble statistics over seeds
==============================

Runs a handful of seeds, computes the per-run Pearson correlation of C_rel
against D_rel and aggregates the runs in Fisher-z space. Use
`oedegrade ensemble DIR --generate 0-19` for the full twenty-seed ensemble.
"""

from oedegrade import cli, stats, vqa

traces = [vqa.run_protocol(vqa.ProtocolConfig(seed=s)) for s in range(5)]
reports = [cli.correlation_in_window(t.column("c_rel"), t.column("d_rel"), t.column("k")) for t in traces]
for t, rep in zip(traces, reports):
    print(f"seed {t.config.seed}: r = {rep.r:+.4f}  p = {rep.p_value:.2e}  CI = ({rep.ci_low:+.3f}, {rep.ci_high:+.3f})")

summary = stats.ensemble_summary([r.r for r in reports], reports[0].n)
print(summary.as_dict())

# Fisher interval for a strongly negative correlation on 119 points
print(stats.fisher_ci(-0.9309, 119))
