"""Weighted random dot product networks: generation, embedding, analysis."""

from .analysis import (
    NullEnsembleReport,
    evaluate_null_likelihood,
    null_compare,
    weighted_clustering,
)
from .community import (
    Partition,
    StressRecord,
    StressReport,
    angular_kmeans,
    centrality,
    dimension_sweep,
    stress,
    stress_penalized,
)
from .embedding import Embedding, SolverConfig, embed, residual
from .graph import (
    GraphFormatError,
    SymmetricOffDiagonal,
    WeightedGraph,
    load_graph,
    save_graph,
    total_weight,
)
from .model import (
    AxisNoise,
    Constant,
    DomainError,
    DrawnVectors,
    EdgeDistribution,
    FiniteSupport,
    LatentModel,
    ModelError,
    MultiresolutionAxis,
    Ray,
    dot_product_grid,
    draw_vectors,
    log_likelihood,
    sample_from_grids,
    sample_network,
)
from .specialize import (
    BlockModelSpec,
    ChungLuSpec,
    NotPSDError,
    complete_diagonal,
    factor_psd,
    fit_poisson_er,
    make_chung_lu,
    make_er,
    make_sbm,
)

__all__ = [name for name in dir() if not name.startswith("_")]
