"""Time the compiled Gram kernel against the numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--n 2000] [--repeat 5]

Both backends receive identical inputs; the script checks that their
outputs agree before reporting the best-of-N wall time per call.
"""
import argparse
import timeit

import numpy as np

from swiptsec import _kernels_py, kernels
from swiptsec.channel import crandn
from swiptsec.sysmodel import substream


def make_inputs(n, M, K, eta, seed=0):
    r = substream(seed)
    G = crandn(r, (n, M, K))
    gw = crandn(r, (n, M))
    N = crandn(r, (n, M, eta), 0.01)
    Phi, _ = np.linalg.qr(crandn(r, (n, eta, K)))
    pw = crandn(r, (n, eta))
    pw /= np.linalg.norm(pw, axis=-1, keepdims=True)
    return (G, gw, N, np.ascontiguousarray(Phi), pw, 1.0, 0.5, np.ones(K))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=2000, help="realizations per call")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    if kernels.BACKEND != "cython":
        print("compiled kernel not available; only the numpy backend is timed")
    print(f"{'M':>6} {'K':>3} {'eta':>4} {'numpy [ms]':>11} {'cython [ms]':>12} {'speedup':>8}")
    for M, K, eta in ((16, 2, 2), (64, 4, 4), (200, 4, 4), (512, 4, 8), (1024, 8, 8)):
        args_ = make_inputs(args.n, M, K, eta)
        t_py = min(timeit.repeat(lambda: _kernels_py.realization_gains(*args_), number=1, repeat=args.repeat))
        if kernels.BACKEND == "cython":
            for a, b in zip(kernels.realization_gains(*args_), _kernels_py.realization_gains(*args_)):
                np.testing.assert_allclose(a, b, rtol=1e-10, atol=1e-12)
            t_cy = min(timeit.repeat(lambda: kernels.realization_gains(*args_), number=1, repeat=args.repeat))
            print(f"{M:>6} {K:>3} {eta:>4} {1e3 * t_py:>11.2f} {1e3 * t_cy:>12.2f} {t_py / t_cy:>8.2f}")
        else:
            print(f"{M:>6} {K:>3} {eta:>4} {1e3 * t_py:>11.2f} {'-':>12} {'-':>8}")


if __name__ == "__main__":
    main()
