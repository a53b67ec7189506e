"""Per-node path statistics and their scalar summaries.

Five statistics per node, all measured in edges on parent paths to the
root: S (shortest), L (longest), R (follow the first-drawn parent),
Rminus / Rplus (greedily follow the smallest / largest parent index).
Each admits a one-pass recurrence because parents precede their node:

    S[i] = 1 + min_p S[p]        L[i] = 1 + max_p L[p]
    R[i] = 1 + R[slot-0 parent]  Rminus[i] = 1 + Rminus[min parent]
    Rplus[i] = 1 + Rplus[max parent]

The scalar summary takes, per statistic, the value at node n, the max
over nodes 1..n and the min over nodes ceil(n/2)..n.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels, graph_model
from .errors import DomainError, ResourceError

STAT_NAMES = ("S", "Rminus", "R", "Rplus", "L")


def parse_stats(spec):
    """'S,Rminus' -> ('S', 'Rminus'); validates and keeps canonical order."""
    if isinstance(spec, str):
        parts = [p for p in spec.split(",") if p]
    else:
        parts = list(spec)
    bad = [p for p in parts if p not in STAT_NAMES]
    if bad:
        raise DomainError(f"unknown statistics {bad}; choose from {STAT_NAMES}")
    if not parts:
        raise DomainError("statistics subset must be non-empty")
    return tuple(s for s in STAT_NAMES if s in parts)


@dataclass(frozen=True, eq=False)
class DepthProfile:
    """Selected per-node depth arrays (uint32, length n+1); others None."""

    n: int
    S: np.ndarray = None
    Rminus: np.ndarray = None
    R: np.ndarray = None
    Rplus: np.ndarray = None
    L: np.ndarray = None

    def array(self, name):
        return getattr(self, name)

    @property
    def stats(self):
        return tuple(s for s in STAT_NAMES if getattr(self, s) is not None)


@dataclass(frozen=True)
class StatTriple:
    value_at_n: int
    max_1_to_n: int
    min_half_to_n: int


@dataclass(frozen=True)
class ParamSummary:
    """The scalar parameters for the selected statistics at one dag."""

    n: int
    entries: dict  # stat name -> StatTriple

    def flat(self):
        out = {}
        for name, t in self.entries.items():
            out[f"{name}.value_at_n"] = t.value_at_n
            out[f"{name}.max_1_to_n"] = t.max_1_to_n
            out[f"{name}.min_half_to_n"] = t.min_half_to_n
        return out


def compute_profiles(dag_or_stream, stats=STAT_NAMES):
    """Run the recurrences over a KDag or over a streamed (n, k, mode, seed).

    A materialized KDag is traversed from its table; a 4-tuple or dict
    spec generates parents on the fly, allocating only the selected
    depth arrays (one uint32 array of length n+1 per statistic).
    """
    stats = parse_stats(stats)
    want = _kernels.want_mask(stats)
    if isinstance(dag_or_stream, graph_model.KDag):
        arrays = _kernels.table_profiles(dag_or_stream.parents, want)
        n = dag_or_stream.n
    else:
        if isinstance(dag_or_stream, dict):
            spec = dag_or_stream
        else:
            n, k, mode, seed = dag_or_stream
            spec = {"n": n, "k": k, "mode": mode, "seed": seed}
        n = int(spec["n"])
        arrays = _kernels.stream_profiles(
            int(spec["seed"]),
            n,
            int(spec["k"]),
            graph_model._mode_code(spec["mode"]),
            want,
        )
    return DepthProfile(n=n, **arrays)


def summarize(profile):
    """ParamSummary over the profile's populated statistics."""
    half = (profile.n + 1) // 2
    entries = {}
    for name in profile.stats:
        arr = profile.array(name)
        entries[name] = StatTriple(
            value_at_n=int(arr[profile.n]),
            max_1_to_n=int(arr[1:].max()),
            min_half_to_n=int(arr[half:].min()),
        )
    return ParamSummary(n=profile.n, entries=entries)


def summarize_stream(n, k, mode, seed, stats=STAT_NAMES):
    """Summary without retaining a profile (depth arrays freed on return)."""
    return summarize(compute_profiles({"n": n, "k": k, "mode": mode, "seed": seed}, stats))


def brute_force_extremes(dag, node, budget=2_000_000):
    """(shortest, longest) for one node by exhaustive path enumeration.

    Independent of the recurrences on purpose: walks every parent path
    depth-first.  The step budget guards the k**depth blowup.
    """
    if node == 0:
        return (0, 0)
    shortest = node + 1
    longest = -1
    steps = 0
    # stack of (node, depth); revisits allowed — we enumerate paths, not nodes
    stack = [(int(node), 0)]
    while stack:
        v, d = stack.pop()
        steps += 1
        if steps > budget:
            raise ResourceError(
                f"path enumeration exceeded {budget} steps at node {node}; "
                "use the recurrences for large instances"
            )
        if v == 0:
            shortest = min(shortest, d)
            longest = max(longest, d)
            continue
        for p in dag.parents_of(v):
            stack.append((int(p), d + 1))
    return (shortest, longest)


def assert_sandwich(profile):
    """Pointwise invariants: S <= each greedy depth <= L <= node index.

    Raises AssertionError at the first violated node.  Cheap enough to
    run on every profile the test-suite produces.
    """
    n = profile.n
    idx = np.arange(n + 1, dtype=np.int64)
    greedy = [profile.array(s) for s in ("Rminus", "R", "Rplus") if profile.array(s) is not None]
    for name in profile.stats:
        arr = profile.array(name)
        assert arr[0] == 0, f"{name}[0] != 0"
        assert (arr[1:] >= 1).all(), f"{name} has a zero depth past the root"
    if profile.L is not None:
        assert (profile.L <= idx).all(), "L exceeds node index"
        for g in greedy:
            assert (g <= profile.L).all(), "a greedy depth exceeds L"
    if profile.S is not None:
        for g in greedy:
            assert (profile.S <= g).all(), "S exceeds a greedy depth"
        if profile.L is not None:
            assert (profile.S <= profile.L).all(), "S exceeds L"
