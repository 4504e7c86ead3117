"""End-to-end benchmark: why TMR cannot separate a trivial demorpher from
a perfect one, and how the cross-weighted metric can.

Generates texture-face identities and alpha-blend morphs, materializes
the two baseline demorphers, evaluates both with the grid embedder, and
prints the side-by-side reports.
"""

import sys
import tempfile
from pathlib import Path

from demorpheval import run_evaluation
from demorpheval.harness import materialize_baseline, render_report
from demorpheval.synth import build_grid_store, make_benchmark

root = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp(prefix="bench_"))

print(f"generating benchmark under {root} ...")
records, manifest = make_benchmark(root, n_identities=40, n_morphs=100, seed=7)

for kind in ("trivial", "oracle"):
    baseline_records, _ = materialize_baseline(records, kind, root / kind)
    store = build_grid_store(baseline_records)
    report, _, _ = run_evaluation(
        baseline_records, store, dataset_name=f"synthetic/{kind}", fmr=0.10, tau=0.4
    )
    print(render_report(report, "markdown"))

print("Both demorphers hit 100% TMR and 100% RA -- replication is invisible there.")
print("BW(SSIM) separates them: ~2.0 for the oracle, far lower for replication.")
