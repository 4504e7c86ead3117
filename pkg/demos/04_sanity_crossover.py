"""The identity-blindness demonstration.

Plain SSIM eventually ranks a DIFFERENT person's photo above a noisy copy
of the SAME person; the cross-weighted metric keeps the ranking sensible
because the biometric weight of the wrong identity stays low.  The suite
sweeps noise levels and reports every value plus the crossover levels.
"""

import sys
import tempfile
from pathlib import Path

from demorpheval import sanity_suite
from demorpheval.errors import SanityCheckError

out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp(prefix="sanity_"))

try:
    result = sanity_suite(seed=0, out_dir=out_dir)
except SanityCheckError as exc:
    print(f"metric implementation broken: {exc}")
    raise SystemExit(3)

print((out_dir / "sanity_table.md").read_text())
print(f"full report: {out_dir / 'sanity_report.json'}")
