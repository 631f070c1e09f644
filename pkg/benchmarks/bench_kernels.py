"""Time the numba kernels against their numpy twins.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from flexstiff import _kernels
from flexstiff.fe_oracle import discretize
from flexstiff.geometry import RssParams, build_rss_path


def compliance_case(n_meanders):
    path = build_rss_path(RssParams(n_meanders=n_meanders))
    gx, gw = np.polynomial.legendre.leggauss(2)
    ei = 169e9 * path.second_moments()
    return (path.vertices(), ei, gx, gw)


def frame_case(n_meanders, elems_per_segment):
    model, _ = discretize(build_rss_path(RssParams(n_meanders=n_meanders)), elems_per_segment)
    conn, ea, ei = model.element_arrays()
    return (model.coords(), conn, ea, ei)


def bench(fn, args, repeat, number):
    fn(*args)  # warm-up / JIT compile
    return min(timeit.repeat(lambda: fn(*args), repeat=repeat, number=number)) / number


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    opts = ap.parse_args()
    if not _kernels.HAS_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    jit_c = _kernels.bending_compliance_jit or _kernels.njit(_kernels._bending_compliance_loop)
    jit_a = _kernels.assemble_frame_jit or _kernels.njit(_kernels._assemble_frame_loop)

    print(f"{'kernel':<34}{'numpy [us]':>12}{'numba [us]':>12}{'speedup':>10}")
    for n in (1, 4, 32):
        args = compliance_case(n)
        t_np = bench(_kernels.bending_compliance_numpy, args, opts.repeat, 2000)
        t_nb = bench(jit_c, args, opts.repeat, 2000)
        print(f"{f'compliance N={n} ({len(args[1])} seg)':<34}{t_np * 1e6:>12.2f}{t_nb * 1e6:>12.2f}{t_np / t_nb:>10.1f}")
    for n, e in ((1, 2), (4, 8), (16, 16)):
        args = frame_case(n, e)
        t_np = bench(_kernels.assemble_frame_numpy, args, opts.repeat, 50)
        t_nb = bench(jit_a, args, opts.repeat, 50)
        label = f"assembly N={n} ({len(args[1])} elem)"
        print(f"{label:<34}{t_np * 1e6:>12.2f}{t_nb * 1e6:>12.2f}{t_np / t_nb:>10.1f}")


if __name__ == "__main__":
    main()
