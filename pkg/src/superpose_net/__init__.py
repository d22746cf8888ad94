"""Simulator and exact-limit analytics for multilayer Bernoulli graph
superpositions."""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    DegenerateMarginal,
    DegenerateStatistic,
    EmptyGraph,
    HypothesisViolation,
    InsufficientSupport,
    InvalidLambda,
    MissingRecords,
    SuperposeError,
    ZeroDenominator,
    ZeroEdgeMass,
    ZeroMean,
    ZeroP10,
)
from .generate import (
    GenConfig,
    GraphSample,
    degrees,
    generate_graph,
    generate_layer,
    read_edge_list,
    write_edge_list,
)
from .layers import (
    CrossMoments,
    LayerType,
    LayerTypeDistribution,
    cross_moment,
    edge_biased_distribution,
    sample_layer_type,
)
from .limits import (
    LimitParams,
    MomentReport,
    RankCorrelations,
    TailPrediction,
    compound_poisson_pmf,
    fprime2_pmf,
    increment_pmf,
    limiting_assortativity,
    limiting_bidegree_pmf,
    limiting_degree_pmf,
    limiting_moments,
    limiting_rank_correlations,
    tail_prediction,
)
from .stats import (
    Pmf1D,
    Pmf2D,
    bidegree_distribution,
    degree_distribution,
    kendall,
    layer_subgraph_counts,
    pearson_correlation,
    size_biased,
    spearman,
)
from .study import (
    ConvergenceReport,
    StudySpec,
    run_study,
    tail_slope_fit,
    tv_distance_1d,
    tv_distance_2d,
)
