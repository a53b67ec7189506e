"""Random recursive k-dag simulator, depth statistics, and the solved
limit-constant tables.

Numerical kernels run on a compiled extension when available; set
RECDAG_PURE_PYTHON=1 before import to force the numpy fallback.  Both
lanes produce bit-identical results (python -m recdag.bench checks).
"""

__version__ = "0.1.0"

from ._kernels import LANE as KERNEL_LANE
from .constants import constants_row, constants_table
from .graph_model import KDag, build_dag, load_dag, node_parents, stream_nodes
from .montecarlo import ExperimentConfig, ExperimentRecord, run_experiment
from .path_stats import DepthProfile, compute_profiles, summarize, summarize_stream
from .rng import GENERATOR_ID, RngStream

__all__ = [
    "__version__",
    "KERNEL_LANE",
    "GENERATOR_ID",
    "RngStream",
    "KDag",
    "build_dag",
    "load_dag",
    "node_parents",
    "stream_nodes",
    "DepthProfile",
    "compute_profiles",
    "summarize",
    "summarize_stream",
    "constants_row",
    "constants_table",
    "ExperimentConfig",
    "ExperimentRecord",
    "run_experiment",
]
