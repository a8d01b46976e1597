"""Benchmark the compiled kernels against the pure-Python fallback.

Times the two hot loops (RK4 stepping and per-sample network training) on
both backends, verifies the results agree bit for bit, and prints the
speedup.  Run from a checkout with the package installed:

    python benchmarks/compare_backends.py [--steps N] [--epochs N]
"""

import argparse
import time

import numpy as np

from epispread._backend import load_backend


def time_integration(mod, n_steps):
    max_samples = n_steps + 1
    times = np.empty(max_samples)
    states = np.empty((max_samples, 2))
    t0 = time.perf_counter()
    count, status, _ = mod.integrate_si(
        0.0001, 0.8, 1.0, 1.0, 1, 10.0, 0.0, 0.0, 0, 0.0,
        10000.0, 10.0, 0.001, n_steps, 1, 1, 0, times, states,
    )
    elapsed = time.perf_counter() - t0
    return elapsed, states[:count].copy()


def time_training(mod, epochs, n=500):
    rng = np.random.default_rng(0)
    xs = rng.uniform(-1.0, 1.0, n)
    ys = np.sin(2.0 * xs)
    r = np.random.default_rng(1)
    wh = r.uniform(-0.5, 0.5, 5)
    bh = r.uniform(-0.5, 0.5, 5)
    wo = r.uniform(-0.5, 0.5, 5)
    bo = np.array([r.uniform(-0.5, 0.5)])
    vwh, vbh, vwo, vbo = (np.zeros(5), np.zeros(5), np.zeros(5), np.zeros(1))
    orders = [r.permutation(n).astype(np.int64) for _ in range(epochs)]
    t0 = time.perf_counter()
    for order in orders:
        mod.mlp_epoch(wh, bh, wo, bo, vwh, vbh, vwo, vbo, xs, ys, order,
                      0.05, 0.9, 0)
    mse = mod.mlp_mse(wh, bh, wo, bo, xs, ys, 0)
    elapsed = time.perf_counter() - t0
    return elapsed, (wh, bh, wo, bo, mse)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=int, default=200_000,
                        help="RK4 steps for the integration benchmark")
    parser.add_argument("--epochs", type=int, default=400,
                        help="training epochs for the network benchmark")
    args = parser.parse_args()

    backends = {}
    for name in ("cython", "purepy"):
        try:
            backends[name] = load_backend(name)
        except ImportError:
            print(f"backend {name} unavailable, skipping")
    if len(backends) < 2:
        print("need both backends for a comparison")

    print(f"\nintegration: {args.steps} RK4 steps of the epidemic system")
    results = {}
    for name, mod in backends.items():
        elapsed, states = time_integration(mod, args.steps)
        results[name] = (elapsed, states)
        rate = args.steps / elapsed / 1e6
        print(f"  {name:7s} {elapsed * 1e3:9.1f} ms   ({rate:.2f} Msteps/s)")
    if len(results) == 2:
        agree = np.array_equal(results["cython"][1], results["purepy"][1])
        speedup = results["purepy"][0] / results["cython"][0]
        print(f"  speedup {speedup:.1f}x, outputs bit-identical: {agree}")

    print(f"\ntraining: {args.epochs} epochs x 500 samples, 1-5-1 network")
    results = {}
    for name, mod in backends.items():
        elapsed, out = time_training(mod, args.epochs)
        results[name] = (elapsed, out)
        rate = args.epochs * 500 / elapsed / 1e6
        print(f"  {name:7s} {elapsed * 1e3:9.1f} ms   ({rate:.2f} Mupdates/s)")
    if len(results) == 2:
        a, b = results["cython"][1], results["purepy"][1]
        agree = all(np.array_equal(x, y) for x, y in zip(a[:4], b[:4]))
        agree = agree and a[4] == b[4]
        speedup = results["purepy"][0] / results["cython"][0]
        print(f"  speedup {speedup:.1f}x, outputs bit-identical: {agree}")


if __name__ == "__main__":
    main()
