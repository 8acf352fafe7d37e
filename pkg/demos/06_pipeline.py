"""
The whole pipeline from Python
==============================

Equivalent to ``mobembed all --config configs/desk.yaml --out out-desk``.
"""

import os
import sys

from mobembed.config import load_config
from mobembed.pipeline import format_summary, run_all

here = os.path.dirname(os.path.abspath(__file__))
out = sys.argv[1] if len(sys.argv) > 1 else "out-desk"
cfg, problems = load_config(os.path.join(here, "..", "configs", "desk.yaml"), out_dir=out)
if problems:
    sys.exit("\n".join(problems))

print(format_summary(run_all(cfg)))
print("artifacts under", os.path.abspath(out))
