"""Release-gate battery: thirteen checks, one test and one verdict line each.

Each test prints ``ACCEPTANCE [name] PASS|FAIL — detail`` before asserting, so
a ``pytest -v`` run shows the verdicts and failed gates carry their numbers.
Two gates pin externally tabulated 4-decimal digit strings; where our solved
roots disagree with a pinned digit the test states the gate verbatim and fails
honestly rather than papering over the difference (details in the comments).

Monte Carlo gates use one fixed master seed chosen up front; results stand
whether or not a given statistical margin happens to be kind to it.
"""

import math
import time

import numpy as np

from recdag import constants, graph_model, label_process as lp, montecarlo as mc, path_stats
from recdag.rng import RngStream

MASTER = 2718281828

SIGMA2 = constants.constants_row(2).sigma


def report(name, ok, detail):
    print(f"ACCEPTANCE [{name}] {'PASS' if ok else 'FAIL'} — {detail}")
    return ok


# Gate digits for k=2, truncated (not rounded) to 4 decimals.
# Known discrepancy: the solved min-variant root is 1.67380505...; it
# truncates to "1.6738", while the gate pins "1.6737".  High-precision
# re-solves (50-digit arithmetic, two equivalent formulations) confirm our
# root, so the pinned digit looks like a last-place artifact in the gate's
# source; the test keeps the gate verbatim and stays red until it is amended.
GATE_K2 = {
    "sigma": "0.3733",
    "rho_minus": "0.6666",
    "rho_minus_max": "1.6737",
    "rho": "1.0000",
    "rho_max": "2.7182",
    "rho_plus_low": "0.3733",
    "rho_plus": "2.0000",
    "rho_plus_high": "4.3110",
    "lambda_upper": "4.3110",
    "lambda_max": "5.4365",
}

# Gate digits for all 34 tabulated k: (sigma, rho_minus, rho_minus_max).
# The sigma and rho_minus columns agree everywhere; 21 of the 34
# rho_minus_max entries differ from our solved roots by one in the last
# printed digit, with signs in both directions — consistent with the gate
# column having been rounded rather than truncated at a few rows.
GATE_TABLE = {
    2: ("0.3733", "0.6666", "1.6737"),
    3: ("0.3040", "0.5454", "1.3025"),
    4: ("0.2708", "0.4800", "1.1060"),
    5: ("0.2503", "0.4379", "0.9818"),
    6: ("0.2361", "0.4081", "0.8951"),
    7: ("0.2254", "0.3856", "0.8305"),
    8: ("0.2170", "0.3679", "0.7800"),
    9: ("0.2102", "0.3534", "0.7393"),
    10: ("0.2045", "0.3414", "0.7057"),
    11: ("0.1996", "0.3311", "0.6773"),
    12: ("0.1954", "0.3222", "0.6531"),
    13: ("0.1916", "0.3144", "0.6318"),
    14: ("0.1883", "0.3075", "0.6132"),
    15: ("0.1854", "0.3013", "0.5966"),
    16: ("0.1827", "0.2957", "0.5816"),
    17: ("0.1802", "0.2907", "0.5683"),
    18: ("0.1780", "0.2861", "0.5560"),
    19: ("0.1760", "0.2818", "0.5448"),
    20: ("0.1740", "0.2779", "0.5346"),
    21: ("0.1723", "0.2743", "0.5251"),
    22: ("0.1706", "0.2709", "0.5164"),
    23: ("0.1691", "0.2677", "0.5083"),
    24: ("0.1676", "0.2648", "0.5007"),
    25: ("0.1663", "0.2620", "0.4936"),
    26: ("0.1650", "0.2594", "0.4868"),
    27: ("0.1638", "0.2569", "0.4805"),
    28: ("0.1626", "0.2546", "0.4747"),
    29: ("0.1615", "0.2524", "0.4690"),
    30: ("0.1604", "0.2503", "0.4638"),
    35: ("0.1559", "0.2411", "0.4409"),
    40: ("0.1521", "0.2337", "0.4225"),
    45: ("0.1490", "0.2275", "0.4074"),
    50: ("0.1463", "0.2222", "0.3946"),
}


def test_table_k2():
    t0 = time.perf_counter()
    row = constants.constants_row(2)
    bad = []
    for field, want in GATE_K2.items():
        got = constants.truncate4(getattr(row, field))
        if got != want:
            bad.append(f"{field}: ours {got} gate {want}")
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 1.0
    detail = f"all 10 entries match in {elapsed:.3f}s" if not bad else "; ".join(bad)
    assert report("table-k2", ok, detail), detail


def test_table_all_k():
    t0 = time.perf_counter()
    rows = {r.k: r for r in constants.constants_table()}
    bad = []
    for k, (g_sigma, g_rm, g_rmm) in GATE_TABLE.items():
        r = rows[k]
        for field, want in (("sigma", g_sigma), ("rho_minus", g_rm), ("rho_minus_max", g_rmm)):
            got = constants.truncate4(getattr(r, field))
            if got != want:
                bad.append(f"k={k} {field} ours {got} gate {want}")
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 5.0
    detail = (
        f"all 34x3 entries match in {elapsed:.3f}s"
        if not bad
        else f"{len(bad)}/102 entries differ (all rho_minus_max, last digit): " + "; ".join(bad[:4]) + " ..."
    )
    assert report("table-all-k", ok, detail), detail


def test_solver_residuals():
    worst = 0.0
    for k in constants.TABLE_KS:
        r = constants.constants_row(k)
        res = [
            constants.rate_exponent(r.sigma, k) - 1.0,
            constants.rate_exponent(r.lambda_upper, k) - 1.0,
            constants.rate_exponent(r.rho_plus_low, k) - (k - 1.0),
            constants.rate_exponent(r.rho_plus_high, k) - (k - 1.0),
            r.rho_minus * constants.harmonic(k) - 1.0,
        ]
        res.extend(constants.minmax_system_residuals(r.rho_minus_max, r.f_at_solution, k))
        worst = max(worst, max(abs(x) for x in res))
    r2 = constants.constants_row(2)
    pair_gap = max(abs(r2.rho_plus_low - r2.sigma), abs(r2.rho_plus_high - r2.lambda_upper))
    ok = worst < 1e-10 and pair_gap < 1e-12
    detail = f"worst residual {worst:.2e} (<1e-10), k=2 coincidence gap {pair_gap:.2e} (<1e-12)"
    assert report("solver-residuals", ok, detail), detail


def test_dp_vs_bruteforce():
    t0 = time.perf_counter()
    count = 0
    for k in (1, 2, 3):
        for n in range(2, 13):
            for s in range(35):
                for mode in ("with-replacement", "without-replacement"):
                    dag = graph_model.build_dag(n, k, mode, seed=1000 * k + 10 * n + s)
                    prof = path_stats.compute_profiles(dag, ("S", "L"))
                    for node in range(n + 1):
                        bs, bl = path_stats.brute_force_extremes(dag, node)
                        assert (bs, bl) == (int(prof.S[node]), int(prof.L[node])), (k, n, s, node)
                    count += 1
    elapsed = time.perf_counter() - t0
    ok = count >= 1000 and elapsed < 30.0
    detail = f"{count} dags, every node exact, {elapsed:.1f}s"
    assert report("dp-vs-bruteforce", ok, detail), detail


def test_pointwise_sandwich():
    checked = 0
    for n in (10, 100, 1000, 10**4):
        for k in (1, 2, 3, 8):
            for mode in ("with-replacement", "without-replacement"):
                prof = path_stats.compute_profiles(
                    {"n": n, "k": k, "mode": mode, "seed": 50_000 + checked}
                )
                mids = np.stack([prof.Rminus, prof.R, prof.Rplus])
                assert np.all(prof.S <= mids.min(axis=0)), (n, k, mode)
                assert np.all(mids.max(axis=0) <= prof.L), (n, k, mode)
                assert np.all(prof.L <= np.arange(n + 1)), (n, k, mode)
                checked += 1
    detail = f"S <= (Rminus,R,Rplus) <= L <= i at every node of {checked} dags"
    assert report("pointwise-sandwich", True, detail), detail


def test_urrt_depth_harmonic_mean():
    t0 = time.perf_counter()
    n, reps = 10**5, 200
    seeds = mc._replication_seeds(MASTER, reps)
    depths = np.asarray(mc._kernels.chain_depths(seeds, n), dtype=np.float64)
    h_n = float(np.sum(1.0 / np.arange(1, n + 1)))
    se = depths.std(ddof=1) / math.sqrt(reps)
    gap = abs(depths.mean() - h_n)
    elapsed = time.perf_counter() - t0
    ok = gap <= 4 * se and elapsed < 120.0
    detail = f"mean {depths.mean():.4f} vs H_n {h_n:.4f}, |diff| {gap:.4f} <= 4*SE {4 * se:.4f}, {elapsed:.2f}s"
    assert report("urrt-depth-harmonic-mean", ok, detail), detail


def test_first_parent_tail_bound():
    t0 = time.perf_counter()
    chk = mc.check_rn_tail(10**4, 10**5, master_seed=MASTER)
    elapsed = time.perf_counter() - t0
    ok = chk.passed and elapsed < 300.0
    worst = min(r.bound - r.frequency for r in chk.rows)
    detail = (
        f"P(depth > t) <= bound + 3*SE for t in [{chk.rows[0].t},{chk.rows[-1].t}], "
        f"min(bound - freq) {worst:+.2e}, {elapsed:.2f}s"
    )
    assert report("first-parent-tail-bound", ok, detail), detail


def test_min_depth_window_frequency():
    t0 = time.perf_counter()
    results = []
    for n in (10**2, 10**3, 10**4, 10**5):
        c = mc.check_min_r(n, 1000, master_seed=MASTER, threads=8)
        results.append((n, c.frequency, c.se))
    last_ok = results[-1][1] >= 0.95
    nondec = all(
        results[i + 1][1] >= results[i][1] - 2 * math.hypot(results[i][2], results[i + 1][2])
        for i in range(len(results) - 1)
    )
    elapsed = time.perf_counter() - t0
    ok = last_ok and nondec and elapsed < 180.0
    freqs = ", ".join(f"n={n}: {f:.3f}" for n, f, _ in results)
    detail = f"{freqs}; final >= 0.95 {last_ok}, non-decreasing within 2*SE {nondec}, {elapsed:.1f}s"
    assert report("min-depth-window-frequency", ok, detail), detail


def test_shortest_ratio_window():
    # Convergence of these ratios is O(1/ln n), so the n=10^6 means sit well
    # above the limit; the gate windows are pilot-calibrated but, at this
    # seed, both means land just outside them (value by ~1 SE, max by far
    # more).  The trend clauses hold.  Kept verbatim and red: the windows
    # understate the finite-size offset, and widening them here would turn
    # the gate into a tautology.
    t0 = time.perf_counter()
    means = {}
    for n in (10**3, 10**4, 10**5, 10**6):
        cfg = mc.ExperimentConfig(k=2, n=n, stats=("S",), replications=100, master_seed=MASTER)
        agg = mc.run_experiment(cfg, threads=8).aggregates()
        means[n] = (
            agg["S.value_at_n"]["mean"], agg["S.value_at_n"]["se"],
            agg["S.max_1_to_n"]["mean"], agg["S.max_1_to_n"]["se"],
        )
    vm, _, mm, _ = means[10**6]
    w_value = (0.85 * SIGMA2, 1.40 * SIGMA2)
    w_max = (1.00 * SIGMA2, 1.80 * SIGMA2)
    in_value = w_value[0] <= vm <= w_value[1]
    in_max = w_max[0] <= mm <= w_max[1]
    ns = sorted(means)
    trend_value = all(
        means[ns[i + 1]][0] <= means[ns[i]][0] + 2 * math.hypot(means[ns[i]][1], means[ns[i + 1]][1])
        for i in range(3)
    )
    trend_max = all(
        means[ns[i + 1]][2] <= means[ns[i]][2] + 2 * math.hypot(means[ns[i]][3], means[ns[i + 1]][3])
        for i in range(3)
    )
    elapsed = time.perf_counter() - t0
    ok = in_value and in_max and trend_value and trend_max and elapsed < 600.0
    detail = (
        f"value {vm:.5f} in [{w_value[0]:.5f},{w_value[1]:.5f}] {in_value}; "
        f"max {mm:.5f} in [{w_max[0]:.5f},{w_max[1]:.5f}] {in_max}; "
        f"monotone toward limit: value {trend_value}, max {trend_max}; {elapsed:.1f}s"
    )
    assert report("shortest-ratio-window", ok, detail), detail


def test_greedy_ratio_windows():
    t0 = time.perf_counter()
    cfg = mc.ExperimentConfig(
        k=2, n=10**6, stats=("Rminus", "Rplus"), replications=100, master_seed=MASTER
    )
    agg = mc.run_experiment(cfg, threads=8).aggregates()
    rm = agg["Rminus.value_at_n"]["mean"]
    rp = agg["Rplus.value_at_n"]["mean"]
    rm_ok = 0.9 <= rm / (2.0 / 3.0) <= 1.1
    rp_ok = 0.9 <= rp / 2.0 <= 1.1
    elapsed = time.perf_counter() - t0
    ok = rm_ok and rp_ok and elapsed < 600.0
    detail = (
        f"Rminus/ln n {rm:.5f} = {rm / (2 / 3):.4f}x(2/3) {rm_ok}; "
        f"Rplus/ln n {rp:.5f} = {rp / 2:.4f}x2 {rp_ok}; {elapsed:.1f}s"
    )
    assert report("greedy-ratio-windows", ok, detail), detail


def test_brw_ratio_window():
    t0 = time.perf_counter()
    ell, reps = 20, 200
    vals = [lp.sample_brw(ell, 2, RngStream(MASTER, i)).value / ell for i in range(reps)]
    m = float(np.mean(vals))
    lo, hi = 0.85 / SIGMA2, 1.15 / SIGMA2
    elapsed = time.perf_counter() - t0
    ok = lo <= m <= hi and elapsed < 300.0
    detail = f"mean(value)/ell {m:.4f} in [{lo:.4f},{hi:.4f}] (1/sigma = {1 / SIGMA2:.4f}), {elapsed:.1f}s"
    assert report("brw-ratio-window", ok, detail), detail


def test_gamma_bound_dominance():
    # ties (a=1, where the upper bound IS the tail) decided up to roundoff
    t0 = time.perf_counter()
    tie = 1e-12
    violations = 0
    points = 0
    for a in (1.0, 2.0, 5.0, 10.0, 20.0):
        for j in range(1, 51):
            x = 0.1 * a * j
            if x > a - 1.0:
                points += 1
                if lp.gamma_upper_bound(a, x) < lp.regularized_gamma_q(a, x) * (1 - tie):
                    violations += 1
            if a > 1.0 and 0.0 < x < a - 1.0:
                points += 1
                if lp.gamma_lower_bound(a, x) < lp.regularized_gamma_p(a, x) * (1 - tie):
                    violations += 1
    elapsed = time.perf_counter() - t0
    ok = violations == 0 and elapsed < 1.0
    detail = f"{points} grid points, {violations} violations, {elapsed:.3f}s"
    assert report("gamma-bound-dominance", ok, detail), detail


def test_thread_determinism(tmp_path):
    cfg = mc.ExperimentConfig(
        k=3, n=2000, stats=("S", "R", "L"), replications=16, master_seed=MASTER
    )
    blobs = {}
    for tag, threads in (("t1a", 1), ("t1b", 1), ("t4", 4), ("t8", 8)):
        rec = mc.run_experiment(cfg, threads=threads)
        path = tmp_path / f"{tag}.jsonl"
        mc.persist(rec, path)
        blobs[tag] = path.read_bytes()
    ok = len(set(blobs.values())) == 1
    detail = f"4 runs (threads 1,1,4,8) -> {len(set(blobs.values()))} distinct byte streams"
    assert report("thread-determinism", ok, detail), detail
