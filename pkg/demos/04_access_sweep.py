"""Access probability against load for K=2..5 and alpha in {1, 2, inf}.

Default is a quick 1,000-window pass; pass a window count as the first
argument for the full 10,000 (about a quarter of an hour on one core).
"""
import sys

import numpy as np

from iicdsa.harness import fig4_spec, run_sweep
from iicdsa.model import format_alpha
from iicdsa.plot import FIG4_AXES, emit_plot
from iicdsa.results import write_results

windows = int(sys.argv[1]) if len(sys.argv) > 1 else 1000
rows = run_sweep(fig4_spec(windows=windows, seed=0))
write_results(rows, "csv", "access_sweep.csv")
emit_plot(rows, FIG4_AXES, "access_sweep.svg")

gammas = sorted({r.gamma for r in rows})
print("gamma   " + " ".join(f"{g:6.1f}" for g in gammas))
for k in (2, 3, 4, 5):
    for alpha in (1, 2, float("inf")):
        p = np.array([r.access_prob for r in rows if r.k == k and r.alpha == alpha])
        print(f"K={k} a={format_alpha(alpha):<3} " + " ".join(f"{x:6.3f}" for x in p))

# best K per load for each alpha
for alpha in (1, 2, float("inf")):
    table = np.array([[r.access_prob for r in rows if r.k == k and r.alpha == alpha] for k in (2, 3, 4, 5)])
    print(f"alpha={format_alpha(alpha)} best K:", [2 + int(i) for i in table.argmax(axis=0)])
