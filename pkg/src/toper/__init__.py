"""TopER: graph embeddings from filtration growth (pivot, growth)."""

from .embed import EmbeddingMatrix, ToperVector, default_specs, embed_dataset, fit_line, fit_quadratic, refine_sequence, toper_embed
from .errors import (
    EmptyInput,
    GraphComputeError,
    InvalidParam,
    MetricUndefined,
    MissingAttribute,
    ParseError,
    StratificationError,
    ToperError,
    TrainingDiverged,
)
from .filtfn import EdgeValues, NodeValues, compute_function, ollivier_ricci_values, solve_transport
from .filtration import FiltrationSequence, FiltrationSpec, ThresholdSet, betti_pairs, build_thresholds, filtration_sequence
from .graph import Graph, GraphCollection, dataset_stats, generate_power_law_graph, load_dataset, parse_tu_dataset

__version__ = "0.1.0"

__all__ = [
    "EmbeddingMatrix", "ToperVector", "default_specs", "embed_dataset", "fit_line", "fit_quadratic",
    "refine_sequence", "toper_embed",
    "EmptyInput", "GraphComputeError", "InvalidParam", "MetricUndefined", "MissingAttribute", "ParseError",
    "StratificationError", "ToperError", "TrainingDiverged",
    "EdgeValues", "NodeValues", "compute_function", "ollivier_ricci_values", "solve_transport",
    "FiltrationSequence", "FiltrationSpec", "ThresholdSet", "betti_pairs", "build_thresholds", "filtration_sequence",
    "Graph", "GraphCollection", "dataset_stats", "generate_power_law_graph", "load_dataset", "parse_tu_dataset",
]
