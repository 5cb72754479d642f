"""Compare the compiled and pure-Python multiplier kernels.

Usage: python benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from hybrid_irs.algorithms import AlgOptions, max_snr_fp
from hybrid_irs.channel import ScenarioConfig, build_channels
from hybrid_irs.convex_kernel import BACKENDS, get_backend
from hybrid_irs.irs_model import IrsLayout


def kernel_inputs(n, rng):
    b2 = rng.random(n)
    q = rng.random(n) * 10 ** rng.uniform(-2, 2, n)
    g, curv, G = rng.random(n), rng.random(n), rng.random(n) + 0.1
    return b2 / b2.sum(), q, g, curv, G


def bench(name, fn, repeat, number=1):
    t = min(timeit.repeat(fn, number=number, repeat=repeat)) / number
    return name, t


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    names = sorted(BACKENDS)
    print(f"backends: {', '.join(names)}")
    rng = np.random.default_rng(0)
    rows = []
    for n in (8, 64, 256):
        b2, q, g, curv, G = kernel_inputs(n, rng)
        for be in names:
            k = get_backend(be)
            # the ball/ellipsoid budget is set to bind
            rows.append((f"ball_ellipsoid n={n}", be,
                         bench(be, lambda: [k.ball_ellipsoid_multipliers(b2, q, 0.05) for _ in range(50)],
                               args.repeat)[1] / 50))
            rows.append((f"psi_multiplier n={n}", be,
                         bench(be, lambda: [k.psi_multiplier(g, curv, G, 2.0, 0.1 * n) for _ in range(50)],
                               args.repeat)[1] / 50))
    cfg = ScenarioConfig()
    ch = build_channels(cfg)
    lay = IrsLayout.hybrid(cfg.M, cfg.M_a, cfg.beta_max)
    for be in names:
        rows.append(("max_snr_fp headline", be,
                     bench(be, lambda: max_snr_fp(cfg, ch, lay, AlgOptions(backend=be)), args.repeat, 5)[1]))

    base = {(task): t for task, be, t in rows if be == "python"}
    print(f"{'task':28s} {'backend':9s} {'seconds':>12s} {'speed-up':>9s}")
    for task, be, t in rows:
        print(f"{task:28s} {be:9s} {t:12.3e} {base[task] / t:9.1f}x")


if __name__ == "__main__":
    main()
