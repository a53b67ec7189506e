"""Compiled kernels and the pure-numpy lane must agree bit for bit."""

import json
import os
import subprocess
import sys

import numpy as np
import pytest

from recdag import _fallback

_core = pytest.importorskip("recdag._core")


def test_raw_blocks_parity():
    for k0, k1, start, count in [(0, 0, 0, 16), (42, 7, 3, 9), (2**64 - 1, 5, 10**6, 4)]:
        a = _core.raw_blocks(k0, k1, start, count)
        b = _fallback.raw_blocks(k0, k1, start, count)
        assert a.dtype == b.dtype == np.uint64
        assert np.array_equal(a, b)


@pytest.mark.parametrize("mode", [0, 1])
@pytest.mark.parametrize("n,k", [(50, 1), (50, 2), (2000, 3), (300, 8), (9, 6)])
def test_parents_parity(n, k, mode):
    # ranges straddling i < k exercise the deficit slots
    seed = 123456789
    b = _fallback.parents_block(seed, 1, n + 1, k, mode)
    a = np.empty_like(b)
    _core.parents_fill(seed, 1, n + 1, k, mode, a)
    assert np.array_equal(a, b)


def test_parents_partial_range_parity():
    seed, k = 77, 4
    b = _fallback.parents_block(seed, 500, 800, k, 1)
    a = np.empty_like(b)
    _core.parents_fill(seed, 500, 800, k, 1, a)
    assert np.array_equal(a, b)


@pytest.mark.parametrize("want", list(range(1, 32)))
def test_stream_profiles_parity_all_masks(want):
    a = _core.stream_profiles(31337, 400, 3, 0, want)
    b = _fallback.stream_profiles(31337, 400, 3, 0, want)
    assert set(a) == set(b)
    for name in a:
        assert np.array_equal(a[name], b[name]), name


@pytest.mark.parametrize("mode", [0, 1])
def test_table_profiles_parity(mode):
    parents = _fallback.parents_block(9001, 1, 1501, 2, mode)
    a = _core.table_profiles(parents, 0b11111)
    b = _fallback.table_profiles(parents, 0b11111)
    for name in a:
        assert np.array_equal(a[name], b[name]), name


def test_chain_depths_parity():
    seeds = _fallback.raw_blocks(11, 0, 0, 64).ravel()[:100].copy()
    a = _core.chain_depths(seeds, 10**5)
    b = _fallback.chain_depths(seeds, 10**5)
    assert np.array_equal(a, b)


def test_brw_max_sum_parity():
    for k0, k1, ell, k in [(5, 0, 1, 1), (5, 1, 8, 2), (99, 3, 5, 4), (7, 7, 12, 2)]:
        a = _core.brw_max_sum(k0, k1, ell, k)
        b = _fallback.brw_max_sum(k0, k1, ell, k)
        assert a == b  # identical arithmetic order, so exact equality


def test_pure_python_env_switch():
    code = (
        "import json, recdag\n"
        "s = recdag.summarize_stream(1000, 2, 'with-replacement', 42,"
        " ('S', 'Rminus', 'R', 'Rplus', 'L'))\n"
        "print(json.dumps({'lane': recdag.KERNEL_LANE, 'flat': s.flat()}))\n"
    )
    env = dict(os.environ)
    out = {}
    for forced in ("0", "1"):
        env["RECDAG_PURE_PYTHON"] = forced
        proc = subprocess.run(
            [sys.executable, "-c", code], capture_output=True, text=True, env=env
        )
        assert proc.returncode == 0, proc.stderr
        out[forced] = json.loads(proc.stdout)
    assert out["0"]["lane"] == "compiled"
    assert out["1"]["lane"] == "python"
    assert out["0"]["flat"] == out["1"]["flat"]
