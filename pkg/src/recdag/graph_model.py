"""Uniform random recursive k-dags.

Node 0 is the root; node i >= 1 picks k parents uniformly from
{0, ..., i-1}, independently across nodes, either with replacement
(independent slots) or without (distinct values; a node with fewer than
k predecessors gets all of them once, in random order, and zeros in the
remaining slots).

Parent draws for node i come from the stream keyed (seed, i), so any
node's parents are recomputable in O(1) without replaying the rest of
the dag.  That makes materialized tables, streamed visits, spot lookups
and first-parent chains all agree by construction, and lets table fills
run block-parallel while staying bit-identical to sequential builds.
"""

import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DomainError, ParseError, ResourceError
from .rng import RngStream, _check_u64

MODE_WITH = "with-replacement"
MODE_WITHOUT = "without-replacement"

_BLOCK = 1 << 16


def normalize_mode(mode):
    m = str(mode).lower()
    if m in ("with", MODE_WITH):
        return MODE_WITH
    if m in ("without", MODE_WITHOUT):
        return MODE_WITHOUT
    raise DomainError(f"mode must be 'with' or 'without' (replacement), got {mode!r}")


def _mode_code(mode):
    return 0 if normalize_mode(mode) == MODE_WITH else 1


def _check_arity(k):
    if not isinstance(k, (int, np.integer)) or not 1 <= int(k) <= 64:
        raise DomainError(f"arity k must be an integer in [1, 64], got {k!r}")
    return int(k)


@dataclass(frozen=True, eq=False)
class KDag:
    """Materialized dag: row i-1 of `parents` holds the k parents of node i."""

    n: int
    k: int
    mode: str
    seed: int
    parents: np.ndarray

    def parents_of(self, node):
        if node == 0:
            return self.parents[:0, 0]  # empty
        return self.parents[node - 1]

    def validate(self):
        """Check the structural invariant: every parent of node i is < i."""
        nodes = np.arange(1, self.n + 1, dtype=np.int64)
        if not (self.parents.astype(np.int64) < nodes[:, None]).all():
            raise ValueError("corrupt dag: some parent index is >= its node")

    @property
    def nbytes(self):
        return self.parents.nbytes


def build_dag(n, k, mode=MODE_WITH, seed=0, compact=None, threads=1):
    """Materialize the dag for (n, k, mode, seed).

    compact=None picks 32-bit parent storage automatically when indices
    fit; compact=False forces 64-bit.  threads > 1 fills the table in
    parallel row-blocks (output is identical for any thread count).
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    k = _check_arity(k)
    seed = _check_u64(seed, "seed")
    mode = normalize_mode(mode)
    code = _mode_code(mode)
    if compact is None:
        compact = n < 1 << 32
    elif compact and n >= 1 << 32:
        raise DomainError("compact 32-bit storage requires n < 2**32")
    dtype = np.uint32 if compact else np.uint64
    nbytes = n * k * np.dtype(dtype).itemsize
    try:
        table = np.empty((n, k), dtype=dtype)
    except MemoryError as exc:
        raise ResourceError(
            f"cannot allocate parent table: {nbytes} bytes for n={n}, k={k}"
        ) from exc

    spans = [(lo, min(lo + _BLOCK, n + 1)) for lo in range(1, n + 1, _BLOCK)]
    if threads > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(
                pool.map(
                    lambda span: _kernels.parents_fill_into(
                        seed, span[0], span[1], k, code, table[span[0] - 1:span[1] - 1]
                    ),
                    spans,
                )
            )
    else:
        for lo, hi in spans:
            _kernels.parents_fill_into(seed, lo, hi, k, code, table[lo - 1:hi - 1])
    table.setflags(write=False)
    return KDag(n=n, k=k, mode=mode, seed=seed, parents=table)


def stream_nodes(n, k, mode, seed, visitor):
    """Visit (node, parent row) for nodes 1..n in order, O(block) memory.

    The visited rows equal build_dag's table rows for the same arguments.
    Exceptions from the visitor propagate and stop the stream.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    k = _check_arity(k)
    seed = _check_u64(seed, "seed")
    code = _mode_code(mode)
    for lo in range(1, n + 1, _BLOCK):
        hi = min(lo + _BLOCK, n + 1)
        block = _kernels.parents_block(seed, lo, hi, k, code)
        for t in range(hi - lo):
            visitor(lo + t, block[t])


def node_parents(seed, node, k, mode=MODE_WITH):
    """Parents of one node, recomputed in O(1) from the seed."""
    if node < 1:
        raise DomainError(f"node must be >= 1, got {node}")
    row = _kernels.parents_block(
        _check_u64(seed, "seed"), node, node + 1, _check_arity(k), _mode_code(mode)
    )
    return [int(p) for p in row[0]]


def draw_parents(node, k, mode, rng):
    """Draw the k parents of `node` from an RngStream positioned at its start.

    With rng = RngStream(seed, node) this reproduces node_parents(seed,
    node, k, mode): the dag's randomness is addressed per node.
    """
    if node < 1:
        raise DomainError(f"node must be >= 1, got {node}")
    k = _check_arity(k)
    mode = normalize_mode(mode)
    out = []
    if mode == MODE_WITH:
        for u in (rng.uniforms() for _ in range(k)):
            out.append(min(int(u * node), node - 1))
        return out
    chosen = []
    for j in range(k):
        remaining = node - j
        if remaining <= 0:
            out.append(0)
            continue
        v = min(int(rng.uniforms() * remaining), remaining - 1)
        for c in chosen:
            if v >= c:
                v += 1
        chosen.append(v)
        chosen.sort()
        out.append(v)
    return out


# ---------------------------------------------------------------------------
# Text dump / load


def dump_dag(out, n, k, mode, seed):
    """Stream the dag as TSV without materializing it."""
    mode = normalize_mode(mode)
    out.write(f"# recdag n={n} k={k} mode={mode} seed={seed}\n")

    def emit(node, row):
        out.write("%d\t%s\n" % (node, "\t".join(str(int(p)) for p in row)))

    stream_nodes(n, k, mode, seed, emit)


def load_dag(fp):
    """Parse a dump back into a KDag (validates the parent invariant)."""
    header = fp.readline()
    if not header.startswith("# recdag "):
        raise ParseError("missing '# recdag' header", line=1)
    fields = dict(tok.split("=", 1) for tok in header[len("# recdag "):].split())
    try:
        n = int(fields["n"])
        k = int(fields["k"])
        mode = normalize_mode(fields["mode"])
        seed = int(fields["seed"])
    except (KeyError, ValueError) as exc:
        raise ParseError(f"bad header field: {exc}", line=1) from exc
    table = np.empty((n, k), dtype=np.uint64 if n >= 1 << 32 else np.uint32)
    for lineno, line in enumerate(fp, start=2):
        if not line.strip():
            continue
        parts = line.split()
        try:
            node = int(parts[0])
            row = [int(p) for p in parts[1:]]
        except ValueError as exc:
            raise ParseError(f"non-numeric row: {exc}", line=lineno) from exc
        if not 1 <= node <= n or len(row) != k:
            raise ParseError(f"bad row for node {parts[0]}", line=lineno)
        table[node - 1] = row
    table.setflags(write=False)
    dag = KDag(n=n, k=k, mode=mode, seed=seed, parents=table)
    dag.validate()
    return dag


def dump_dag_string(n, k, mode, seed):
    buf = io.StringIO()
    dump_dag(buf, n, k, mode, seed)
    return buf.getvalue()
