"""Compare the compiled kernels against the pure-python lane.

Run as:  python -m recdag.bench [--n N] [--k K]

Both lanes are imported directly (the env-var switch only affects the
dispatch module), results are cross-checked for equality, and the best
of three timings is reported per workload.
"""

import argparse
import sys
import time

import numpy as np

from . import _fallback


def _best_of(fn, repeat=3):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _fmt(seconds):
    if seconds < 1e-3:
        return f"{seconds * 1e6:8.1f} us"
    if seconds < 1.0:
        return f"{seconds * 1e3:8.2f} ms"
    return f"{seconds:8.3f} s "


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=lambda s: int(float(s)), default=1_000_000)
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--seed", type=int, default=12345)
    args = ap.parse_args(argv)

    try:
        from . import _core
    except ImportError:
        print("compiled kernels not built; nothing to compare against", file=sys.stderr)
        return 1

    from . import _philox

    n, k, seed = args.n, args.k, args.seed
    want = 0b11111
    chain_seeds = _philox.philox4_np(
        0, 0, 0, 0, seed, np.arange(10_000, dtype=np.uint64)
    )[0]

    rows = []

    # parent drawing, both modes
    for mode_code, mode_name in ((0, "with"), (1, "without")):
        out_c = np.empty((n, k), dtype=np.uint32)
        t_c, _ = _best_of(lambda: _core.parents_fill(seed, 1, n + 1, k, mode_code, out_c))
        t_p, blk = _best_of(lambda: _fallback.parents_block(seed, 1, n + 1, k, mode_code))
        if not np.array_equal(out_c, blk.astype(np.uint32)):
            print("LANE MISMATCH in parents", file=sys.stderr)
            return 1
        rows.append((f"parents   n={n:.0e} k={k} {mode_name}-repl", t_c, t_p))

    # fused generate + depth recurrences, all five statistics
    t_c, prof_c = _best_of(lambda: _core.stream_profiles(seed, n, k, 0, want))
    t_p, prof_p = _best_of(lambda: _fallback.stream_profiles(seed, n, k, 0, want))
    for name in prof_c:
        if not np.array_equal(prof_c[name], prof_p[name]):
            print(f"LANE MISMATCH in profiles[{name}]", file=sys.stderr)
            return 1
    rows.append((f"profiles  n={n:.0e} k={k} all-5", t_c, t_p))

    # single-parent hop chains
    t_c, d_c = _best_of(lambda: _core.chain_depths(chain_seeds, n))
    t_p, d_p = _best_of(lambda: _fallback.chain_depths(chain_seeds, n))
    if not np.array_equal(d_c, d_p):
        print("LANE MISMATCH in chains", file=sys.stderr)
        return 1
    rows.append((f"chains    reps=10000 n={n:.0e}", t_c, t_p))

    # max-sum displacement over a full k-ary tree
    ell = 20 if k == 2 else max(4, int(24 / np.log2(max(k, 2))))
    t_c, v_c = _best_of(lambda: _core.brw_max_sum(seed, 0, ell, k))
    t_p, v_p = _best_of(lambda: _fallback.brw_max_sum(seed, 0, ell, k))
    if v_c != v_p:
        print("LANE MISMATCH in brw", file=sys.stderr)
        return 1
    rows.append((f"brw       ell={ell} k={k}", t_c, t_p))

    print(f"{'workload':<34}{'compiled':>12}{'python':>12}{'speedup':>9}")
    for name, t_c, t_p in rows:
        print(f"{name:<34}{_fmt(t_c):>12}{_fmt(t_p):>12}{t_p / t_c:>8.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
