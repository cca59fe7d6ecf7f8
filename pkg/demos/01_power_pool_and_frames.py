"""Power levels, a random frame, and what plain per-RB decoding gets out of it."""
from iicdsa.decoder import dec_crc
from iicdsa.framegen import generate_access_map, superpose, window_rng
from iicdsa.model import ChannelParams, SystemConfig, build_power_pool

channel = ChannelParams(tau=1, noise_power=1)

# each level equals tau times (all weaker levels + noise)
for L in (1, 2, 3, 4):
    print(L, [str(p) for p in build_power_pool(channel, L).levels])

# one frame at N=5, R=10, K=3
cfg = SystemConfig(n_devices=5, n_rbs=10, k_repetitions=3, seed=1)
amap = generate_access_map(cfg, window_rng(cfg.seed, 5, 10, 3, 0))
print(amap.to_json())

m0 = superpose(amap, cfg)
for i, rb in enumerate(m0.rbs):
    cells = " ".join(f"n{s.device_id + 1}@{s.power}" for s in rb.real)
    print(f"RB{i + 1:<3} {cells}")

print("exclusive devices:", sorted(d + 1 for d in amap.exclusive_devices()))
found = dec_crc(m0, channel, amap)
print("decoded without IC:", sorted(s.device_id + 1 for s in found))
