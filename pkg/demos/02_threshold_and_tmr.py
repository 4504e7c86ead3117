"""Threshold calibration at a target FMR, then TMR and Restoration Accuracy.

Builds a synthetic genuine/impostor score mix and walks the calibration:
the threshold is the smallest impostor score whose false-match fraction
stays within the target.
"""

import numpy as np

from demorpheval import ScoreSet, compute_threshold_at_fmr, restoration_accuracy, tmr

rng = np.random.default_rng(7)

scores = ScoreSet(
    genuine=list(np.clip(rng.normal(0.58, 0.12, 200), -1, 1)),
    impostor=list(np.clip(rng.normal(0.30, 0.12, 1000), -1, 1)),
)

for target in (0.01, 0.05, 0.10, 0.25):
    thr = compute_threshold_at_fmr(scores, target)
    value = tmr(scores, thr)
    print(
        f"target FMR {target:>5.0%}: threshold {thr.value:+.4f} "
        f"(achieved {thr.achieved_fmr:.4f}) -> TMR {value:.2%}"
    )

# Restoration Accuracy uses a fixed threshold instead of a calibrated one:
# a morph counts only if BOTH outputs beat tau against their ground truths.
pairs = [tuple(rng.normal(0.6, 0.2, 2)) for _ in range(300)]
for tau in (0.3, 0.4, 0.5):
    print(f"RA(tau={tau}) = {restoration_accuracy(pairs, tau):.2%}")
