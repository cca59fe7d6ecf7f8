"""What each extra iteration costs, next to the worst-case counts."""
import sys

from iicdsa.harness import fig5_spec, run_sweep
from iicdsa.metrics import bound_for
from iicdsa.plot import FIG5_AXES, emit_plot

windows = int(sys.argv[1]) if len(sys.argv) > 1 else 1000
rows = run_sweep(fig5_spec(windows=windows, seed=0))
emit_plot(rows, FIG5_AXES, "complexity_vs_alpha.svg")

for r in rows:
    b = bound_for(r.alpha, r.n, r.r)
    print(f"g={r.gamma:.1f} K={r.k} a={r.alpha}  P={r.access_prob:.4f}"
          f"  wr={r.mean_wr:10.1f} dec={r.mean_dec:9.1f} sto={r.mean_peak_storage:9.1f}"
          f"  max sto {r.max_peak_storage:7d} / bound {b.sto if b else '-'}")
