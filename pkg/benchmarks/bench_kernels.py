"""Compiled vs pure-Python Dijkstra kernels, and what that means for a FastMap embed.

    python3 benchmarks/bench_kernels.py [--n 2000] [--repeat 5]
"""

import argparse
import time

import numpy as np

from fmgt import generators, kernels
from fmgt.embed import EmbedConfig, SqrtShortestPath, embed


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    g = generators.gen_waxman(args.n, 0.05, 0.05, rng=rng)
    sources = rng.choice(g.n, size=min(32, g.n), replace=False)
    print(f"graph: n={g.n} m={g.m}; backends: {sorted(kernels.BACKENDS)}")

    ref = None
    for name, mod in sorted(kernels.BACKENDS.items()):
        d = mod.dijkstra_many(g.indptr, g.indices, g.weights, sources)
        if ref is None:
            ref = d
        assert np.allclose(d, ref), f"{name} disagrees with reference"
        t1 = best_of(lambda: mod.dijkstra(g.indptr, g.indices, g.weights, int(sources[0])), args.repeat)
        tm = best_of(lambda: mod.dijkstra_many(g.indptr, g.indices, g.weights, sources), args.repeat)
        print(f"{name:9s} single-source {1e3 * t1:8.2f} ms   {len(sources)} sources {1e3 * tm:9.2f} ms")

    saved = kernels.BACKEND_NAME
    cfg = EmbedConfig(kappa=10, mode=SqrtShortestPath())
    try:
        for name in sorted(kernels.BACKENDS):
            kernels.set_backend(name)
            t = best_of(lambda: embed(g, cfg, 1), max(1, args.repeat // 2))
            print(f"{name:9s} embed kappa=10 {1e3 * t:9.2f} ms")
    finally:
        kernels.set_backend(saved)


if __name__ == "__main__":
    main()
