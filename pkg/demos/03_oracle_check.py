"""Cross-check the engine against the brute-force closure and exact probabilities."""
from iicdsa.decoder import run_engine
from iicdsa.framegen import superpose
from iicdsa.harness import run_point
from iicdsa.model import UNBOUNDED, SystemConfig
from iicdsa.oracle import closure_decode, exact_access_probability, iter_access_maps

# every access map of a tiny system
cfg = SystemConfig(3, 3, 2)
mismatch = 0
for amap in iter_access_maps(cfg):
    m0 = superpose(amap, cfg)
    mismatch += run_engine(m0, cfg, amap, UNBOUNDED).decoded != closure_decode(m0, cfg.channel).decodable
print("maps checked:", sum(1 for _ in iter_access_maps(cfg)), "mismatches:", mismatch)

# Monte Carlo against exact values
for n, r, k in [(2, 2, 1), (2, 3, 2), (3, 3, 2), (3, 4, 1)]:
    c = SystemConfig(n, r, k, windows=10_000, seed=3)
    exact = exact_access_probability(c)
    row = run_point(c)
    print(f"N={n} R={r} K={k}: exact {exact} = {float(exact):.4f}, simulated {row.access_prob:.4f}"
          f" +- {1.96 * row.se_window:.4f}")
