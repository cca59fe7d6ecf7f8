"""The 5-device fixture where the third device needs two cancellations."""
from iicdsa.decoder import ic, run_engine, trace_jsonl
from iicdsa.fixtures import fig3_map
from iicdsa.framegen import superpose
from iicdsa.model import SystemConfig

amap = fig3_map()
cfg = SystemConfig(5, 10, 3)
m0 = superpose(amap, cfg)

# cancel n1 then n2 by hand: RB2 is left with n3 alone, plus ghosts elsewhere
m1 = ic(m0, amap.signal(0), 2)
m2 = ic(m1, amap.signal(1), 3)
for i, (before, after) in enumerate(zip(m0.rbs, m2.rbs)):
    print(f"RB{i + 1:<3} before {sorted(s.device_id + 1 for s in before.real)}"
          f"  after {sorted(s.device_id + 1 for s in after.real)} ghosts {[str(g) for g in after.ghosts]}")

for alpha in (1, 2, 3):
    out = run_engine(m0, cfg, amap, alpha, trace=True)
    print(f"\nalpha={alpha}: decoded {sorted(d + 1 for d in out.decoded)}"
          f" ({out.terminated_by.value}), counters {out.counters.as_tuple()}")
    print(trace_jsonl(out), end="")
