"""Classification and clustering protocol for TopER embeddings."""

from .cv import EvalReport, cluster_report, cross_validate, select_features, standardize, stratified_kfold
from .metrics import calinski_harabasz, clustering_scores, davies_bouldin, silhouette
from .mlp import MLP, DATASET_CONFIGS, MlpConfig, config_from_row, full_grid, table_config, train_mlp
from .selection import lasso_coordinate_descent, lasso_select, t_test_filter, welch_t_test

__all__ = [
    "EvalReport", "cluster_report", "cross_validate", "select_features", "standardize", "stratified_kfold",
    "calinski_harabasz", "clustering_scores", "davies_bouldin", "silhouette",
    "MLP", "DATASET_CONFIGS", "MlpConfig", "config_from_row", "full_grid", "table_config", "train_mlp",
    "lasso_coordinate_descent", "lasso_select", "t_test_filter", "welch_t_test",
]
